"""Core records shared across the pipeline."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Literal

NonProseKind = Literal["table", "figure", "footnote"]
NON_PROSE_KINDS = ("table", "figure", "footnote")


@dataclass(frozen=True)
class Section:
    label: str
    paragraphs: tuple[str, ...]


@dataclass(frozen=True)
class NonProseNode:
    kind: NonProseKind
    content: str


@dataclass(frozen=True)
class ArticleText:
    """Extracted full text of one paper, as produced by a PDF-to-TEI tool."""

    paper_id: str
    sections: tuple[Section, ...]
    non_prose: tuple[NonProseNode, ...] = ()
    title: str = ""
    extraction_tool: str = ""

    def __post_init__(self):
        if not self.paper_id.strip():
            raise ValueError("paper_id must be non-empty")
        for s in self.sections:
            if not s.label.strip():
                raise ValueError(f"{self.paper_id}: empty section label")

    @classmethod
    def from_dict(cls, d: dict) -> ArticleText:
        return cls(
            paper_id=d["paper_id"],
            title=d.get("title", ""),
            extraction_tool=d.get("extraction_tool", ""),
            sections=tuple(
                Section(s["label"], tuple(s.get("paragraphs", ()))) for s in d.get("sections", ())
            ),
            non_prose=tuple(NonProseNode(n["kind"], n["content"]) for n in d.get("non_prose", ())),
        )

    def to_dict(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "title": self.title,
            "sections": [{"label": s.label, "paragraphs": list(s.paragraphs)} for s in self.sections],
            "non_prose": [{"kind": n.kind, "content": n.content} for n in self.non_prose],
        }


@dataclass(frozen=True)
class PropertyValuePair:
    property_label: str
    values: tuple[str, ...]

    def __post_init__(self):
        # accept lists from callers, store tuples so pairs stay hashable
        if not isinstance(self.values, tuple):
            object.__setattr__(self, "values", tuple(self.values))


@dataclass(frozen=True)
class AnnotationRecord:
    """Gold property-value pairs curated for a single paper."""

    paper_id: str
    pairs: tuple[PropertyValuePair, ...]

    def __post_init__(self):
        if not isinstance(self.pairs, tuple):
            object.__setattr__(self, "pairs", tuple(self.pairs))


@dataclass(frozen=True)
class TrainingExample:
    paper_id: str
    input_text: str
    target_summary: str
    input_token_count: int

    @classmethod
    def build(cls, paper_id: str, input_text: str, target_summary: str) -> TrainingExample:
        return cls(paper_id, input_text, target_summary, len(input_text.split()))

    @classmethod
    def from_dict(cls, d: dict) -> TrainingExample:
        return cls(d["paper_id"], d["input_text"], d["target_summary"], int(d["input_token_count"]))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DatasetSplit:
    train: tuple[TrainingExample, ...]
    validation: tuple[TrainingExample, ...]
    test: tuple[TrainingExample, ...]
    seed: int
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)

    def sizes(self) -> tuple[int, int, int]:
        return len(self.train), len(self.validation), len(self.test)


@dataclass
class StructuredSummary:
    raw: str
    pairs: list[PropertyValuePair] = field(default_factory=list)
    malformed_segments: list[str] = field(default_factory=list)

    @property
    def parse_complete(self) -> bool:
        return not self.malformed_segments

    def value_count(self) -> int:
        return sum(len(p.values) for p in self.pairs)
