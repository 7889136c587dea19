"""Targeted property-value extraction from scholarly full texts via structured summaries."""

from structsum.codec import normalize_pairs, parse, serialize
from structsum.types import (
    AnnotationRecord,
    ArticleText,
    DatasetSplit,
    PropertyValuePair,
    StructuredSummary,
    TrainingExample,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationRecord",
    "ArticleText",
    "DatasetSplit",
    "PropertyValuePair",
    "StructuredSummary",
    "TrainingExample",
    "normalize_pairs",
    "parse",
    "serialize",
]
