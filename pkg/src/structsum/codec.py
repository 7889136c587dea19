"""Structured-summary text format.

Grammar (whitespace around delimiters is optional when parsing)::

    summary  := segment (" ; " segment)*
    segment  := label " :: " value (" | " value)*

Labels and values never contain ``;``, ``|`` or ``::``; ``serialize`` replaces
them with ``/`` before emission. The parser splits each segment on the first
``::`` only, so single colons survive inside labels and values.
"""

from __future__ import annotations

import re
from typing import Iterable

from structsum.errors import SummaryParseError
from structsum.types import AnnotationRecord, PropertyValuePair, StructuredSummary

SEGMENT_SEP = " ; "
LABEL_SEP = " :: "
VALUE_SEP = " | "

_WS = re.compile(r"\s+")


def escape(text: str) -> str:
    """Replace reserved delimiter sequences with ``/``."""
    return text.replace("::", "/").replace("|", "/").replace(";", "/")


def clean_field(text: str) -> str:
    return _WS.sub(" ", text).strip()


def normalize_pairs(pairs: Iterable[PropertyValuePair]) -> list[PropertyValuePair]:
    """Canonical form: trimmed, whitespace-collapsed, deduplicated, labels merged.

    Empty labels and empty values are dropped, as is any pair left without values.
    Order follows first occurrence.
    """
    merged: dict[str, list[str]] = {}
    for pair in pairs:
        label = clean_field(pair.property_label)
        if not label:
            continue
        bucket = merged.setdefault(label, [])
        for value in pair.values:
            value = clean_field(value)
            if value and value not in bucket:
                bucket.append(value)
    return [PropertyValuePair(label, tuple(vals)) for label, vals in merged.items() if vals]


def escape_pairs(pairs: Iterable[PropertyValuePair]) -> list[PropertyValuePair]:
    return normalize_pairs(
        PropertyValuePair(escape(p.property_label), tuple(escape(v) for v in p.values)) for p in pairs
    )


def serialize(record: AnnotationRecord | Iterable[PropertyValuePair]) -> str:
    pairs = record.pairs if isinstance(record, AnnotationRecord) else tuple(record)
    pairs = escape_pairs(pairs)
    if not pairs:
        raise ValueError("cannot serialize a record without property-value pairs")
    return SEGMENT_SEP.join(p.property_label + LABEL_SEP + VALUE_SEP.join(p.values) for p in pairs)


def parse(text: str, tolerant: bool = True) -> StructuredSummary:
    """Recover property-value pairs from a (possibly noisy) summary string.

    With ``tolerant=False`` the first malformed segment raises
    :class:`SummaryParseError`; otherwise it is recorded and skipped.
    """
    pairs: list[PropertyValuePair] = []
    malformed: list[str] = []
    for raw_segment in text.split(";"):
        segment = raw_segment.strip()
        if not segment:
            continue
        label, sep, rest = segment.partition("::")
        label = clean_field(label)
        values = [v for v in (clean_field(v) for v in rest.split("|")) if v] if sep else []
        if not label or not values:
            if not tolerant:
                raise SummaryParseError(segment)
            malformed.append(segment)
            continue
        pairs.append(PropertyValuePair(label, tuple(values)))
    return StructuredSummary(raw=text, pairs=normalize_pairs(pairs), malformed_segments=malformed)


def pairs_to_json(pairs: Iterable[PropertyValuePair]) -> list[dict]:
    return [{"property": p.property_label, "values": list(p.values)} for p in pairs]


def pairs_from_json(items: Iterable[dict]) -> list[PropertyValuePair]:
    return [PropertyValuePair(d["property"], tuple(d["values"])) for d in items]
