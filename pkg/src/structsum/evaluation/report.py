"""Evaluation report assembly and rendering (JSON + Markdown)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from structsum import codec
from structsum.evaluation.rouge import RougeScores
from structsum.evaluation.scoring import (
    ExtractionScores,
    evaluate_extraction,
    evaluate_summaries,
)
from structsum.types import TrainingExample


@dataclass(frozen=True)
class ReportRow:
    paper_id: str
    property_label: str
    expected: tuple[str, ...]
    predicted: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "property": self.property_label,
            "expected": list(self.expected),
            "predicted": list(self.predicted),
        }

    @classmethod
    def from_dict(cls, d: dict) -> ReportRow:
        return cls(d["paper_id"], d["property"], tuple(d["expected"]), tuple(d["predicted"]))


@dataclass
class EvaluationReport:
    rouge: RougeScores
    extraction: ExtractionScores
    rows: list[ReportRow] = field(default_factory=list)
    missing_predictions: list[str] = field(default_factory=list)
    n_examples: int = 0
    malformed_segments: int = 0

    def to_dict(self) -> dict:
        return {
            "n_examples": self.n_examples,
            "missing_predictions": list(self.missing_predictions),
            "malformed_segments": self.malformed_segments,
            "rouge": self.rouge.to_dict(),
            "extraction": self.extraction.to_dict(),
            "rows": [r.to_dict() for r in self.rows],
        }

    @classmethod
    def from_dict(cls, d: dict) -> EvaluationReport:
        return cls(
            rouge=RougeScores.from_dict(d["rouge"]),
            extraction=ExtractionScores.from_dict(d["extraction"]),
            rows=[ReportRow.from_dict(r) for r in d.get("rows", [])],
            missing_predictions=list(d.get("missing_predictions", [])),
            n_examples=d.get("n_examples", 0),
            malformed_segments=d.get("malformed_segments", 0),
        )


def build_report(
    predictions: Iterable[tuple[str, str]], gold: Sequence[TrainingExample], lowercase: bool = False
) -> EvaluationReport:
    """Score raw prediction strings against gold examples.

    Gold summaries are parsed strictly; predictions tolerantly.
    """
    predictions = dict(predictions)
    summary_eval = evaluate_summaries(predictions.items(), gold, lowercase)
    parsed = {pid: codec.parse(text, tolerant=True) for pid, text in predictions.items()}
    gold_pairs = {g.paper_id: codec.parse(g.target_summary, tolerant=False).pairs for g in gold}
    extraction = evaluate_extraction(parsed, gold_pairs)

    rows = []
    for g in gold:
        predicted = {p.property_label: p.values for p in parsed[g.paper_id].pairs} if g.paper_id in parsed else {}
        for pair in gold_pairs[g.paper_id]:
            rows.append(ReportRow(g.paper_id, pair.property_label, pair.values, predicted.get(pair.property_label, ())))
    return EvaluationReport(
        rouge=summary_eval.aggregate,
        extraction=extraction,
        rows=rows,
        missing_predictions=summary_eval.missing_ids,
        n_examples=len(gold),
        malformed_segments=sum(len(s.malformed_segments) for s in parsed.values()),
    )


def _md_cell(values: Sequence[str]) -> str:
    text = "<br>".join(values) if values else "-"
    return text.replace("|", "\\|")


def _pct(x: float) -> str:
    return f"{100 * x:.1f}"


def to_markdown(report: EvaluationReport) -> str:
    lines = [
        "# Evaluation report",
        "",
        f"Examples: {report.n_examples}. Missing predictions: {len(report.missing_predictions)}. "
        f"Malformed summary segments: {report.malformed_segments}.",
        "",
        "## ROUGE (macro average, x100)",
        "",
        "| Metric | Precision | Recall | F1 |",
        "|---|---|---|---|",
    ]
    for name, s in (("Rouge-1", report.rouge.rouge1), ("Rouge-2", report.rouge.rouge2), ("Rouge-L", report.rouge.rougeL)):
        lines.append(f"| {name} | {_pct(s.precision)} | {_pct(s.recall)} | {_pct(s.f1)} |")
    ex = report.extraction
    lines += [
        "",
        "## Property-value extraction (micro, exact match, x100)",
        "",
        "| Property | Precision | Recall | F1 | Support |",
        "|---|---|---|---|---|",
        f"| **all** | {_pct(ex.precision)} | {_pct(ex.recall)} | {_pct(ex.f1)} | {ex.tp + ex.fn} |",
    ]
    for label, s in ex.per_property.items():
        lines.append(f"| {_md_cell([label])} | {_pct(s.precision)} | {_pct(s.recall)} | {_pct(s.f1)} | {s.support} |")
    lines += [
        "",
        "## Expected vs. predicted",
        "",
        "| Paper | Property | Expected | Predicted |",
        "|---|---|---|---|",
    ]
    for row in report.rows:
        lines.append(
            f"| {_md_cell([row.paper_id])} | {_md_cell([row.property_label])} | "
            f"{_md_cell(row.expected)} | {_md_cell(row.predicted)} |"
        )
    return "\n".join(lines) + "\n"


def render_report(report: EvaluationReport, path) -> tuple[Path, Path]:
    """Write ``<path>.json`` and ``<path>.md``; returns both paths."""
    base = Path(path)
    if base.suffix in {".json", ".md"}:
        base = base.with_suffix("")
    base.parent.mkdir(parents=True, exist_ok=True)
    json_path = base.with_name(base.name + ".json")
    md_path = base.with_name(base.name + ".md")
    json_path.write_text(json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    md_path.write_text(to_markdown(report), encoding="utf-8")
    return json_path, md_path


def load_report(path) -> EvaluationReport:
    return EvaluationReport.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
