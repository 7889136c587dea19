import json

import pytest

from structsum.codec import parse
from structsum.evaluation import build_report, evaluate_extraction, evaluate_summaries, render_report
from structsum.evaluation.report import EvaluationReport, ReportRow, load_report, to_markdown
from structsum.types import PropertyValuePair as PV, TrainingExample


def ex(pid, target):
    return TrainingExample.build(pid, "irrelevant text", target)


def test_perfect_predictions():
    gold = [ex("a", "P :: x"), ex("b", "Q :: y z")]
    r = evaluate_summaries([("a", "P :: x"), ("b", "Q :: y z")], gold).aggregate
    assert r.rouge1.f1 == r.rouge2.f1 == r.rougeL.f1 == 1.0


def test_macro_mean_and_missing():
    gold = [ex("a", "P :: x"), ex("b", "Q :: y")]
    res = evaluate_summaries([("a", "P :: x")], gold)
    assert res.aggregate.rouge1.f1 == pytest.approx(0.5)
    assert res.missing_ids == ["b"]


def test_unknown_prediction_id_raises():
    with pytest.raises(KeyError):
        evaluate_summaries([("zz", "x")], [ex("a", "P :: x")])


def test_extraction_exact_match():
    gold = {"p": [PV("Summarization type", ("Abstractive",)), PV("Study location", ("Singapore",))]}
    pred = {"p": parse("Summarization type :: Abstractive ; Study location :: The City of Singapore")}
    s = evaluate_extraction(pred, gold)
    assert s.per_property["Summarization type"].f1 == 1.0
    assert s.per_property["Study location"].f1 == 0.0
    assert (s.tp, s.fp, s.fn) == (1, 1, 1)
    assert s.precision == s.recall == 0.5


def test_extraction_empty_prediction():
    s = evaluate_extraction({"p": parse("")}, {"p": [PV("A", ("x",))]})
    assert (s.precision, s.recall, s.f1) == (0.0, 0.0, 0.0)


def test_report_rows_and_round_trip(tmp_path):
    gold = [
        ex("m1", "Data size :: 139 meetings ; Study location :: Singapore"),
        ex("m2", "Preprocessing steps :: Topic segmentation | Anaphora resolution | Pronoun resolution"),
    ]
    preds = [("m1", "Data size :: 20 meetings ; Study location :: The City of Singapore"), ("m2", "Preprocessing steps :: Anaphora resolution")]
    report = build_report(preds, gold)
    assert len(report.rows) == 3
    assert ReportRow("m1", "Data size", ("139 meetings",), ("20 meetings",)) in report.rows
    json_path, md_path = render_report(report, tmp_path / "out" / "rep")
    assert load_report(json_path) == report
    md = md_path.read_text()
    assert "| m1 | Data size | 139 meetings | 20 meetings |" in md
    assert md.count("## ") == 3
    data_rows = md.split("## Expected vs. predicted")[1].strip().splitlines()[2:]
    assert len(data_rows) == 3
    assert set(json.loads(json_path.read_text())) >= {"rouge", "extraction", "rows"}


def test_markdown_escapes_pipes():
    report = build_report([("a", "P :: x")], [ex("a", "P :: x")])
    report.rows[0] = ReportRow("a", "P", ("x/y",), ())
    assert "| a | P | x/y | - |" in to_markdown(report)
