"""ROUGE-N and ROUGE-L over whitespace tokens.

No stemming, no stopword removal, case preserved by default: structured
summaries are format-sensitive, so ``Singapore`` and ``singapore`` differ.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from structsum.evaluation import _kernels


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}

    @classmethod
    def from_dict(cls, d: dict) -> PRF:
        return cls(d["precision"], d["recall"], d["f1"])


ZERO = PRF(0.0, 0.0, 0.0)


def f1_score(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def prf(overlap: int, n_candidate: int, n_reference: int) -> PRF:
    p = overlap / n_candidate if n_candidate else 0.0
    r = overlap / n_reference if n_reference else 0.0
    return PRF(p, r, f1_score(p, r))


def tokenize(text: str, lowercase: bool = False) -> list[str]:
    return (text.lower() if lowercase else text).split()


def _encode(cand: list[str], ref: list[str]) -> tuple[np.ndarray, np.ndarray]:
    vocab: dict[str, int] = {}
    a = np.fromiter((vocab.setdefault(t, len(vocab)) for t in cand), dtype=np.int64, count=len(cand))
    b = np.fromiter((vocab.setdefault(t, len(vocab)) for t in ref), dtype=np.int64, count=len(ref))
    return a, b


def _ngram_keys(a: np.ndarray, b: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Map each n-gram window of ``a`` and ``b`` to a shared dense id."""
    wa = sliding_window_view(a, n) if len(a) >= n else np.empty((0, n), dtype=np.int64)
    wb = sliding_window_view(b, n) if len(b) >= n else np.empty((0, n), dtype=np.int64)
    both = np.concatenate([wa, wb])
    if len(both) == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64), 0
    uniq, inverse = np.unique(both, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1).astype(np.int64)
    return inverse[: len(wa)], inverse[len(wa) :], len(uniq)


def rouge_n(candidate: str, reference: str, n: int, lowercase: bool = False) -> PRF:
    """Clipped n-gram overlap precision / recall / F1."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    a, b = _encode(tokenize(candidate, lowercase), tokenize(reference, lowercase))
    ka, kb, n_keys = _ngram_keys(a, b, n)
    overlap = _kernels.clipped_overlap(ka, kb, n_keys)
    return prf(overlap, len(ka), len(kb))


def rouge_l(candidate: str, reference: str, lowercase: bool = False) -> PRF:
    a, b = _encode(tokenize(candidate, lowercase), tokenize(reference, lowercase))
    return prf(_kernels.lcs_length(a, b), len(a), len(b))


@dataclass(frozen=True)
class RougeScores:
    rouge1: PRF
    rouge2: PRF
    rougeL: PRF

    def to_dict(self) -> dict:
        return {"rouge1": self.rouge1.to_dict(), "rouge2": self.rouge2.to_dict(), "rougeL": self.rougeL.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> RougeScores:
        return cls(PRF.from_dict(d["rouge1"]), PRF.from_dict(d["rouge2"]), PRF.from_dict(d["rougeL"]))


def rouge_all(candidate: str, reference: str, lowercase: bool = False) -> RougeScores:
    return RougeScores(
        rouge_n(candidate, reference, 1, lowercase),
        rouge_n(candidate, reference, 2, lowercase),
        rouge_l(candidate, reference, lowercase),
    )


def _mean(scores: list[PRF]) -> PRF:
    if not scores:
        return ZERO
    k = len(scores)
    return PRF(
        sum(s.precision for s in scores) / k,
        sum(s.recall for s in scores) / k,
        sum(s.f1 for s in scores) / k,
    )


def macro_average(per_example: list[RougeScores]) -> RougeScores:
    return RougeScores(
        _mean([s.rouge1 for s in per_example]),
        _mean([s.rouge2 for s in per_example]),
        _mean([s.rougeL for s in per_example]),
    )
