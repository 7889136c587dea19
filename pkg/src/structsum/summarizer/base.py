"""Backend-independent summarizer pieces: config, truncation, baselines, early stopping."""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Literal, Sequence

from structsum import codec
from structsum.errors import CapabilityError, ConfigError
from structsum.types import AnnotationRecord, PropertyValuePair, TrainingExample

Backend = Literal["neural", "oracle", "lead_baseline"]
BACKENDS = ("neural", "oracle", "lead_baseline")


@dataclass(frozen=True)
class EarlyStopping:
    enabled: bool = True
    patience: int = 3
    monitor: Literal["validation_loss"] = "validation_loss"


@dataclass(frozen=True)
class SummarizerConfig:
    backend: Backend = "neural"
    max_input_tokens: int = 4096
    batch_size: int = 2
    max_epochs: int = 20
    early_stopping: EarlyStopping = field(default_factory=EarlyStopping)
    checkpoint_dir: str | None = None
    seed: int = 0
    beam_size: int = 4
    max_output_tokens: int = 512
    learning_rate: float = 1e-3
    d_model: int = 128
    n_heads: int = 4
    n_layers: int = 2
    dropout: float = 0.1

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ConfigError(f"unknown backend {self.backend!r}; expected one of {BACKENDS}")
        if self.max_input_tokens < 1 or self.batch_size < 1 or self.max_epochs < 1:
            raise ConfigError("max_input_tokens, batch_size and max_epochs must be >= 1")
        if self.early_stopping.enabled and self.early_stopping.patience < 1:
            raise ConfigError("early-stopping patience must be >= 1")
        if self.early_stopping.monitor != "validation_loss":
            raise ConfigError(f"unsupported early-stopping monitor {self.early_stopping.monitor!r}")
        if self.beam_size < 1 or self.max_output_tokens < 1:
            raise ConfigError("beam_size and max_output_tokens must be >= 1")

    @classmethod
    def from_dict(cls, d: dict) -> SummarizerConfig:
        d = dict(d)
        if isinstance(d.get("early_stopping"), dict):
            d["early_stopping"] = EarlyStopping(**d["early_stopping"])
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown summarizer config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


def truncate_input(text: str, max_input_tokens: int) -> str:
    """Keep the first ``max_input_tokens`` whitespace tokens."""
    if max_input_tokens < 1:
        raise ValueError("max_input_tokens must be >= 1")
    tokens = text.split()
    if len(tokens) <= max_input_tokens:
        # pass-through keeps the text unchanged (not re-joined)
        return text
    return " ".join(tokens[:max_input_tokens])


@dataclass
class EpochLog:
    epoch: int
    train_loss: float
    validation_loss: float

    def to_dict(self) -> dict:
        return asdict(self)


def run_training(
    train_epoch: Callable[[int], float],
    validation_loss: Callable[[], float],
    snapshot: Callable[[], object],
    restore: Callable[[object], None],
    max_epochs: int,
    early_stopping: EarlyStopping,
) -> list[EpochLog]:
    """Epoch loop with patience-based early stopping on validation loss.

    ``snapshot`` captures model state after each improving epoch; the best
    snapshot is restored before returning.
    """
    log: list[EpochLog] = []
    best_loss = float("inf")
    best_state = None
    bad_epochs = 0
    for epoch in range(1, max_epochs + 1):
        train_loss = train_epoch(epoch)
        val_loss = validation_loss()
        log.append(EpochLog(epoch, float(train_loss), float(val_loss)))
        if val_loss < best_loss:
            best_loss = val_loss
            best_state = snapshot()
            bad_epochs = 0
        else:
            bad_epochs += 1
            if early_stopping.enabled and bad_epochs >= early_stopping.patience:
                break
    if best_state is not None:
        restore(best_state)
    return log


_SENTENCE_END = re.compile(r"(?<=[.!?])\s+")


def first_sentence(text: str) -> str:
    text = text.strip()
    return _SENTENCE_END.split(text, maxsplit=1)[0] if text else ""


@dataclass
class LeadBaseline:
    """Pairs every property label seen in training with the input's first sentence.

    A deliberately weak extractive floor.
    """

    labels: list[str]
    max_input_tokens: int = 4096

    @classmethod
    def from_examples(cls, examples: Sequence[TrainingExample], max_input_tokens: int = 4096) -> LeadBaseline:
        labels: list[str] = []
        for ex in examples:
            for pair in codec.parse(ex.target_summary).pairs:
                if pair.property_label not in labels:
                    labels.append(pair.property_label)
        return cls(labels, max_input_tokens)

    def generate(self, text: str) -> str:
        sentence = first_sentence(truncate_input(text, self.max_input_tokens))
        pairs = [PropertyValuePair(label, (sentence,)) for label in self.labels]
        try:
            return codec.serialize(pairs)
        except ValueError:
            return ""

    def save(self, directory) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        (d / "lead_baseline.json").write_text(
            json.dumps({"labels": self.labels, "max_input_tokens": self.max_input_tokens}, indent=2) + "\n"
        )

    @classmethod
    def load(cls, directory) -> LeadBaseline:
        d = json.loads((Path(directory) / "lead_baseline.json").read_text())
        return cls(d["labels"], d.get("max_input_tokens", 4096))


class OracleBackend:
    """Returns the gold structured summary; an upper bound for every metric."""

    def generate(self, text: str, gold: AnnotationRecord | TrainingExample | str | None = None) -> str:
        if gold is None:
            raise CapabilityError("oracle backend needs the gold annotation")
        if isinstance(gold, TrainingExample):
            return gold.target_summary
        if isinstance(gold, str):
            return gold
        return codec.serialize(gold)
