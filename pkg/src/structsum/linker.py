"""Exact-lookup entity linking and statement emission."""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Sequence
from urllib.parse import quote, unquote

from structsum.errors import FormatError
from structsum.types import StructuredSummary

logger = logging.getLogger(__name__)

_WS = re.compile(r"\s+")


def lookup_key(label: str) -> str:
    return _WS.sub(" ", label).strip().casefold()


@dataclass
class EntityCatalog:
    entries: dict[str, str] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.entries)

    def add(self, entity_id: str, label: str) -> bool:
        key = lookup_key(label)
        if not key:
            raise ValueError("empty catalog label")
        if key in self.entries:
            self.warnings.append(
                f"label {label!r} ({entity_id}) collides with {self.entries[key]}; keeping the first"
            )
            return False
        self.entries[key] = entity_id
        return True

    def lookup(self, value: str) -> str | None:
        return self.entries.get(lookup_key(value))


def load_catalog(path) -> EntityCatalog:
    catalog = EntityCatalog()
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                d = json.loads(line)
                entity_id, label = d["entity_id"], d["label"]
                if not isinstance(entity_id, str) or not isinstance(label, str) or not entity_id:
                    raise TypeError("entity_id and label must be non-empty strings")
                catalog.add(entity_id, label)
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise FormatError(f"invalid catalog entry ({exc})", path, lineno) from None
    for w in catalog.warnings:
        logger.warning(w)
    return catalog


@dataclass(frozen=True)
class Statement:
    subject: str
    predicate: str
    object: str
    object_kind: Literal["entity", "literal"]

    def __post_init__(self):
        if self.object_kind not in ("entity", "literal"):
            raise ValueError(f"bad object_kind {self.object_kind!r}")
        if not (self.subject and self.predicate and self.object):
            raise ValueError("statement fields must be non-empty")

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "predicate": self.predicate,
            "object_kind": self.object_kind,
            "object": self.object,
        }


def link(summary: StructuredSummary, paper_id: str, catalog: EntityCatalog) -> list[Statement]:
    """One statement per extracted value; entity object on an exact normalized hit, literal otherwise."""
    statements = []
    for pair in summary.pairs:
        for value in pair.values:
            entity_id = catalog.lookup(value)
            if entity_id is None:
                statements.append(Statement(paper_id, pair.property_label, value, "literal"))
            else:
                statements.append(Statement(paper_id, pair.property_label, entity_id, "entity"))
    return statements


def _iri(prefix: str, text: str) -> str:
    return f"<{prefix}:{quote(text, safe='')}>"


def _ntriple(st: Statement) -> str:
    obj = _iri("entity", st.object) if st.object_kind == "entity" else json.dumps(st.object, ensure_ascii=True)
    return f"{_iri('paper', st.subject)} {_iri('prop', st.predicate)} {obj} ."


_NT_LINE = re.compile(r'^<paper:([^>]*)> <prop:([^>]*)> (?:<entity:([^>]*)>|("(?:[^"\\]|\\.)*")) \.$')


def emit_statements(statements: Sequence[Statement], path, format: str = "jsonl") -> None:
    if format not in ("jsonl", "ntriples_like"):
        raise ValueError(f"unknown statement format {format!r}")
    with Path(path).open("w", encoding="utf-8") as fh:
        for st in statements:
            line = json.dumps(st.to_dict(), ensure_ascii=False) if format == "jsonl" else _ntriple(st)
            fh.write(line + "\n")


def read_statements(path, format: str = "jsonl") -> list[Statement]:
    out = []
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            try:
                if format == "jsonl":
                    d = json.loads(line)
                    out.append(Statement(d["subject"], d["predicate"], d["object"], d["object_kind"]))
                else:
                    m = _NT_LINE.match(line)
                    if not m:
                        raise ValueError("not a statement line")
                    subj, pred, ent, lit = m.groups()
                    if ent is not None:
                        out.append(Statement(unquote(subj), unquote(pred), unquote(ent), "entity"))
                    else:
                        out.append(Statement(unquote(subj), unquote(pred), json.loads(lit), "literal"))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise FormatError(f"invalid statement ({exc})", path, lineno) from None
    return out
