"""Summary-level ROUGE and pair-level extraction scoring."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from structsum import codec
from structsum.evaluation.rouge import RougeScores, f1_score, macro_average, rouge_all
from structsum.types import PropertyValuePair, StructuredSummary, TrainingExample

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PropertyScore:
    precision: float
    recall: float
    f1: float
    support: int

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1, "support": self.support}


@dataclass
class ExtractionScores:
    precision: float
    recall: float
    f1: float
    per_property: dict[str, PropertyScore] = field(default_factory=dict)
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "per_property": {k: v.to_dict() for k, v in self.per_property.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> ExtractionScores:
        return cls(
            d["precision"],
            d["recall"],
            d["f1"],
            {k: PropertyScore(**v) for k, v in d.get("per_property", {}).items()},
            d.get("tp", 0),
            d.get("fp", 0),
            d.get("fn", 0),
        )


def counts_to_scores(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    return p, r, f1_score(p, r)


@dataclass
class SummaryEvaluation:
    aggregate: RougeScores
    per_example: dict[str, RougeScores]
    missing_ids: list[str]


def evaluate_summaries(
    predictions: Iterable[tuple[str, str]], gold: Sequence[TrainingExample], lowercase: bool = False
) -> SummaryEvaluation:
    """Macro-averaged ROUGE of predictions against gold target summaries.

    A gold example without a prediction is scored against the empty string
    and listed in ``missing_ids``.
    """
    pred = dict(predictions)
    gold_ids = {g.paper_id for g in gold}
    unknown = sorted(set(pred) - gold_ids)
    if unknown:
        raise KeyError(f"predictions for unknown paper ids: {unknown[:5]}")
    per_example = {}
    missing = []
    for g in gold:
        if g.paper_id not in pred:
            missing.append(g.paper_id)
        per_example[g.paper_id] = rouge_all(pred.get(g.paper_id, ""), g.target_summary, lowercase)
    if missing:
        logger.info("%d gold example(s) have no prediction; scored as empty", len(missing))
    return SummaryEvaluation(macro_average(list(per_example.values())), per_example, missing)


def _value_set(pairs: Iterable[PropertyValuePair]) -> set[tuple[str, str]]:
    return {(p.property_label, v) for p in codec.normalize_pairs(pairs) for v in p.values}


def evaluate_extraction(
    predictions: Mapping[str, StructuredSummary | Sequence[PropertyValuePair]],
    gold: Mapping[str, Sequence[PropertyValuePair]],
) -> ExtractionScores:
    """Micro P/R/F1 over exact normalized (property, value) matches.

    Papers in ``gold`` with no prediction contribute only false negatives.
    ``per_property`` lists properties with gold support.
    """
    counts: dict[str, list[int]] = defaultdict(lambda: [0, 0, 0])  # tp, fp, fn
    for paper_id in sorted(set(gold) | set(predictions)):
        predicted = predictions.get(paper_id, ())
        if isinstance(predicted, StructuredSummary):
            predicted = predicted.pairs
        p_set = _value_set(predicted)
        g_set = _value_set(gold.get(paper_id, ()))
        for label, _ in p_set & g_set:
            counts[label][0] += 1
        for label, _ in p_set - g_set:
            counts[label][1] += 1
        for label, _ in g_set - p_set:
            counts[label][2] += 1

    tp = sum(c[0] for c in counts.values())
    fp = sum(c[1] for c in counts.values())
    fn = sum(c[2] for c in counts.values())
    per_property = {}
    for label in sorted(counts):
        ltp, lfp, lfn = counts[label]
        support = ltp + lfn
        if support:
            per_property[label] = PropertyScore(*counts_to_scores(ltp, lfp, lfn), support=support)
    return ExtractionScores(*counts_to_scores(tp, fp, fn), per_property=per_property, tp=tp, fp=fp, fn=fn)
