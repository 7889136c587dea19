"""Structured-summary generators behind one interface.

``neural`` is trainable and needs torch; ``oracle`` echoes the gold summary;
``lead_baseline`` is a first-sentence extractive floor. Everything except
the neural backend runs without any ML runtime installed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from structsum.errors import CapabilityError
from structsum.summarizer.base import (
    BACKENDS,
    EarlyStopping,
    EpochLog,
    LeadBaseline,
    OracleBackend,
    SummarizerConfig,
    first_sentence,
    run_training,
    truncate_input,
)
from structsum.types import AnnotationRecord, TrainingExample


def neural_available() -> bool:
    try:
        import torch  # noqa: F401
    except ImportError:
        return False
    return True


def _neural():
    try:
        from structsum.summarizer import neural
    except ImportError as exc:
        raise CapabilityError(f"neural backend unavailable: {exc}") from None
    return neural


@dataclass
class TrainedSummarizer:
    config: SummarizerConfig
    backend_handle: object
    training_log: list[EpochLog] = field(default_factory=list)

    def generate(self, text: str) -> str:
        return self.backend_handle.generate(text)

    @classmethod
    def load(cls, checkpoint_dir) -> TrainedSummarizer:
        handle, log = _neural().NeuralSummarizer.load(checkpoint_dir)
        return cls(handle.config, handle, log)


def fit(
    train: Sequence[TrainingExample], validation: Sequence[TrainingExample], config: SummarizerConfig
) -> TrainedSummarizer:
    """Fine-tune the neural backend with early stopping on validation loss.

    The best-validation weights are restored, and written to
    ``config.checkpoint_dir`` (with ``training_log.json``) when set.
    """
    if config.backend != "neural":
        raise CapabilityError(f"backend {config.backend!r} is not trainable")
    if not train:
        raise ValueError("empty training set")
    handle, log = _neural().fit_neural(list(train), list(validation), config)
    return TrainedSummarizer(config, handle, log)


def generate(
    model: TrainedSummarizer | OracleBackend | LeadBaseline,
    text: str,
    gold: AnnotationRecord | TrainingExample | str | None = None,
) -> str:
    if isinstance(model, OracleBackend):
        return model.generate(text, gold)
    if isinstance(model, TrainedSummarizer):
        if not model.training_log:
            raise CapabilityError("neural backend has not been fitted")
        return model.generate(text)
    if isinstance(model, LeadBaseline):
        return model.generate(text)
    raise TypeError(f"not a summarizer backend: {type(model).__name__}")


def load_backend(backend: str, checkpoint_dir=None):
    """Materialize a backend for prediction (oracle needs no checkpoint)."""
    if backend == "oracle":
        return OracleBackend()
    if checkpoint_dir is None:
        raise CapabilityError(f"backend {backend!r} needs a checkpoint directory")
    if backend == "lead_baseline":
        return LeadBaseline.load(checkpoint_dir)
    if backend == "neural":
        if not (Path(checkpoint_dir) / "model.pt").exists():
            raise CapabilityError(f"no neural checkpoint in {checkpoint_dir}")
        return TrainedSummarizer.load(checkpoint_dir)
    raise CapabilityError(f"unknown backend {backend!r}")


__all__ = [
    "BACKENDS",
    "EarlyStopping",
    "EpochLog",
    "LeadBaseline",
    "OracleBackend",
    "SummarizerConfig",
    "TrainedSummarizer",
    "first_sentence",
    "fit",
    "generate",
    "load_backend",
    "neural_available",
    "run_training",
    "truncate_input",
]
