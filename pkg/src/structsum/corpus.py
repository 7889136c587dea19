"""Dataset construction: KG snapshot + extracted texts -> paired, split examples."""

from __future__ import annotations

import json
import logging
import random
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from structsum import codec
from structsum.cleaning import clean_article
from structsum.errors import EmptyCorpusError, FormatError
from structsum.types import (
    AnnotationRecord,
    ArticleText,
    DatasetSplit,
    PropertyValuePair,
    TrainingExample,
)

logger = logging.getLogger(__name__)

URI_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9+.-]*://\S*")
SPLIT_RATIOS = (0.8, 0.1, 0.1)
SPLIT_SUFFIXES = {"train": ".train.jsonl", "validation": ".val.jsonl", "test": ".test.jsonl"}


def is_uri(value: str) -> bool:
    return URI_RE.fullmatch(value.strip()) is not None


def _label_key(label: str) -> str:
    return codec.clean_field(label).casefold()


def records_from_statements(
    statements: Iterable[tuple[str, str, str]], property_blocklist: Iterable[str] = ()
) -> list[AnnotationRecord]:
    """Group (paper_id, property_label, value) statements into records.

    Blocklisted properties and pairs whose values are all URIs are dropped.
    Reserved delimiter sequences are replaced up front so every record
    serializes losslessly.
    """
    blocked = {_label_key(codec.escape(b)) for b in property_blocklist}
    grouped: dict[str, list[PropertyValuePair]] = {}
    for paper_id, label, value in statements:
        grouped.setdefault(paper_id, []).append(PropertyValuePair(label, (value,)))

    records = []
    for paper_id, raw_pairs in grouped.items():
        pairs = [
            p
            for p in codec.escape_pairs(raw_pairs)
            if _label_key(p.property_label) not in blocked and not all(is_uri(v) for v in p.values)
        ]
        if pairs:
            records.append(AnnotationRecord(paper_id, tuple(pairs)))
    return records


def read_snapshot(path) -> list[tuple[str, str, str]]:
    path = Path(path)
    statements = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid JSON ({exc.msg})", path, lineno) from None
            if not isinstance(obj, dict):
                raise FormatError("statement must be a JSON object", path, lineno)
            try:
                fields = obj["paper_id"], obj["property_label"], obj["value"]
            except KeyError as exc:
                raise FormatError(f"missing key {exc.args[0]!r}", path, lineno) from None
            if not all(isinstance(f, str) for f in fields):
                raise FormatError("paper_id, property_label and value must be strings", path, lineno)
            if not fields[0].strip():
                raise FormatError("empty paper_id", path, lineno)
            statements.append(fields)
    return statements


def load_kg_snapshot(path, property_blocklist: Iterable[str] = ()) -> list[AnnotationRecord]:
    records = records_from_statements(read_snapshot(path), property_blocklist)
    if not records:
        raise EmptyCorpusError(f"{path}: no paper has a surviving property-value pair")
    return records


def load_article(path) -> ArticleText:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        return ArticleText.from_dict(data)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"invalid article file ({exc})", path) from None


def load_articles(directory) -> list[ArticleText]:
    articles = [load_article(p) for p in sorted(Path(directory).glob("*.json"))]
    seen = set()
    for a in articles:
        if a.paper_id in seen:
            raise FormatError(f"duplicate paper_id {a.paper_id!r}", directory)
        seen.add(a.paper_id)
    return articles


@dataclass
class PairingResult:
    examples: list[TrainingExample]
    unmatched_ids: list[str] = field(default_factory=list)
    empty_text_ids: list[str] = field(default_factory=list)


def pair_corpus(
    records: Sequence[AnnotationRecord],
    texts: Sequence[ArticleText],
    cleaner: Callable[[ArticleText], str] = clean_article,
) -> PairingResult:
    """Join gold records with their cleaned article texts.

    Records without a text are listed in ``unmatched_ids``; articles that
    clean down to nothing are listed in ``empty_text_ids``. Neither yields an
    example.
    """
    by_id = {t.paper_id: t for t in texts}
    result = PairingResult([])
    for record in records:
        article = by_id.get(record.paper_id)
        if article is None:
            result.unmatched_ids.append(record.paper_id)
            continue
        text = cleaner(article)
        if not text:
            result.empty_text_ids.append(record.paper_id)
            continue
        result.examples.append(
            TrainingExample.build(record.paper_id, text, codec.serialize(record))
        )
    if result.unmatched_ids:
        logger.info("%d record(s) have no article text", len(result.unmatched_ids))
    return result


def split_sizes(n: int) -> tuple[int, int, int]:
    # integer arithmetic: floor(0.8n), floor(0.1n) without float rounding
    n_train = 8 * n // 10
    n_val = n // 10
    return n_train, n_val, n - n_train - n_val


def split_dataset(examples: Sequence[TrainingExample], seed: int) -> DatasetSplit:
    """Seeded shuffle, then 80/10/10 with the flooring remainder going to test."""
    if not examples:
        raise EmptyCorpusError("cannot split an empty dataset")
    order = list(examples)
    random.Random(seed).shuffle(order)
    n_train, n_val, _ = split_sizes(len(order))
    return DatasetSplit(
        train=tuple(order[:n_train]),
        validation=tuple(order[n_train : n_train + n_val]),
        test=tuple(order[n_train + n_val :]),
        seed=seed,
        ratios=SPLIT_RATIOS,
    )


@dataclass
class CorpusStats:
    n_examples: int
    mean_tokens: float
    min_tokens: int
    max_tokens: int
    property_frequency: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "n_examples": self.n_examples,
            "mean_tokens": self.mean_tokens,
            "min_tokens": self.min_tokens,
            "max_tokens": self.max_tokens,
            "property_frequency": self.property_frequency,
        }


def corpus_stats(examples: Sequence[TrainingExample]) -> CorpusStats:
    if not examples:
        return CorpusStats(0, 0.0, 0, 0, {})
    counts = [e.input_token_count for e in examples]
    freq: Counter[str] = Counter()
    for e in examples:
        freq.update(p.property_label for p in codec.parse(e.target_summary).pairs)
    return CorpusStats(
        n_examples=len(examples),
        mean_tokens=sum(counts) / len(counts),
        min_tokens=min(counts),
        max_tokens=max(counts),
        property_frequency=dict(sorted(freq.items(), key=lambda kv: (-kv[1], kv[0]))),
    )


def read_examples(path) -> list[TrainingExample]:
    path = Path(path)
    out = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                out.append(TrainingExample.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise FormatError(f"invalid dataset record ({exc})", path, lineno) from None
    return out


def write_examples(examples: Iterable[TrainingExample], path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for e in examples:
            fh.write(json.dumps(e.to_dict(), ensure_ascii=False) + "\n")


def write_split(split: DatasetSplit, prefix) -> dict:
    """Write ``<prefix>.train/.val/.test.jsonl`` and ``split_manifest.json`` beside them."""
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    files = {}
    for part, suffix in SPLIT_SUFFIXES.items():
        target = prefix.parent / (prefix.name + suffix)
        write_examples(getattr(split, part), target)
        files[part] = target.name
    train, val, test = split.sizes()
    manifest = {
        "seed": split.seed,
        "ratios": list(split.ratios),
        "counts": {"train": train, "validation": val, "test": test},
        "files": files,
    }
    (prefix.parent / "split_manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest
