import pytest

from structsum.errors import CapabilityError, ConfigError
from structsum.evaluation import rouge_all
from structsum.summarizer import (
    EarlyStopping,
    LeadBaseline,
    OracleBackend,
    SummarizerConfig,
    TrainedSummarizer,
    fit,
    generate,
    load_backend,
    neural_available,
    run_training,
    truncate_input,
)
from structsum.types import AnnotationRecord, PropertyValuePair as PV, TrainingExample

needs_torch = pytest.mark.skipif(not neural_available(), reason="torch not installed")


@pytest.mark.parametrize("text, k, expected", [("a b c d", 2, "a b"), ("a b", 10, "a b"), ("a  b\nc", 2, "a b")])
def test_truncate(text, k, expected):
    assert truncate_input(text, k) == expected


def test_truncate_long_text():
    text = " ".join(f"t{i}" for i in range(9000))
    assert len(truncate_input(text, 4096).split()) == 4096


@pytest.mark.parametrize("n, k", [(0, 3), (5, 3), (3, 5), (7, 7)])
def test_truncate_monotone(n, k):
    text = " ".join("x" * n)
    assert len(truncate_input(text, k).split()) == min(k, len(text.split()))


def _run(val_losses, max_epochs=20, es=EarlyStopping()):
    restored = []
    log = run_training(
        train_epoch=lambda e: 1.0,
        validation_loss=iter(val_losses).__next__,
        snapshot=lambda: len(restored),
        restore=restored.append,
        max_epochs=max_epochs,
        early_stopping=es,
    )
    return log, restored


def test_early_stopping_patience_one():
    log, restored = _run([1.0, 2.0, 3.0, 4.0], es=EarlyStopping(True, 1))
    assert len(log) == 2 and restored == [0]


def test_early_stopping_restores_best():
    states = iter(range(100))
    best = []
    log = run_training(
        lambda e: 0.0,
        iter([5, 4, 3, 3.5, 3.2, 3.1, 9]).__next__,
        lambda: next(states),
        best.append,
        20,
        EarlyStopping(True, 3),
    )
    assert [e.epoch for e in log] == [1, 2, 3, 4, 5, 6] and best == [2]


def test_no_early_stopping_runs_all_epochs():
    log, _ = _run([float(i) for i in range(20)], max_epochs=7, es=EarlyStopping(False, 1))
    assert len(log) == 7


def test_config_validation():
    with pytest.raises(ConfigError):
        SummarizerConfig(batch_size=0)
    with pytest.raises(ConfigError):
        SummarizerConfig(backend="gpt")
    with pytest.raises(ConfigError):
        SummarizerConfig(early_stopping=EarlyStopping(True, 0))
    cfg = SummarizerConfig.from_dict({"backend": "oracle", "early_stopping": {"patience": 5}})
    assert cfg.early_stopping.patience == 5
    assert SummarizerConfig.from_dict(cfg.to_dict()) == cfg


def test_oracle_identity(corpus20):
    _, records, examples = corpus20[0], corpus20[0], corpus20[2]
    oracle = OracleBackend()
    for ex in examples:
        out = generate(oracle, ex.input_text, ex)
        assert out == ex.target_summary
        s = rouge_all(out, ex.target_summary)
        assert s.rouge1.f1 == s.rouge2.f1 == s.rougeL.f1 == 1.0
    rec = AnnotationRecord("x", (PV("A", ("b",)),))
    assert generate(oracle, "", rec) == "A :: b"
    with pytest.raises(CapabilityError):
        generate(oracle, "text")


def test_lead_baseline():
    train = [TrainingExample.build("a", "t", "Data size :: 5")]
    lead = LeadBaseline.from_examples(train)
    assert generate(lead, "First sentence. Second.") == "Data size :: First sentence."
    assert generate(lead, "") == ""


def test_lead_baseline_save_load(tmp_path):
    lead = LeadBaseline(["A", "B"], 10)
    lead.save(tmp_path)
    assert load_backend("lead_baseline", tmp_path) == lead


def test_fit_rejects_non_neural():
    ex = [TrainingExample.build("a", "t", "A :: b")]
    with pytest.raises(CapabilityError):
        fit(ex, ex, SummarizerConfig(backend="oracle"))
    with pytest.raises(CapabilityError):
        fit(ex, ex, SummarizerConfig(backend="lead_baseline"))


def test_missing_checkpoint(tmp_path):
    with pytest.raises(CapabilityError):
        load_backend("neural", tmp_path)


def test_unfitted_neural_rejected():
    with pytest.raises(CapabilityError):
        generate(TrainedSummarizer(SummarizerConfig(), object(), []), "text")


@needs_torch
def test_fit_empty_train():
    with pytest.raises(ValueError):
        fit([], [], SummarizerConfig())


@needs_torch
def test_neural_checkpoint_round_trip(tmp_path):
    exs = [
        TrainingExample.build("a", "located in Berlin .", "Study location :: Berlin"),
        TrainingExample.build("b", "located in Lima .", "Study location :: Lima"),
    ]
    cfg = SummarizerConfig(max_epochs=2, d_model=32, n_heads=2, n_layers=1, checkpoint_dir=str(tmp_path), max_output_tokens=8)
    model = fit(exs, exs, cfg)
    assert 1 <= len(model.training_log) <= 2
    assert (tmp_path / "training_log.json").exists()
    loaded = load_backend("neural", tmp_path)
    assert loaded.training_log == model.training_log
    assert generate(loaded, "located in Osaka .") == generate(model, "located in Osaka .")
