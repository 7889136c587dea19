from structsum.evaluation.report import EvaluationReport, ReportRow, build_report, render_report
from structsum.evaluation.rouge import PRF, RougeScores, rouge_all, rouge_l, rouge_n
from structsum.evaluation.scoring import (
    ExtractionScores,
    PropertyScore,
    evaluate_extraction,
    evaluate_summaries,
)

__all__ = [
    "PRF",
    "EvaluationReport",
    "ExtractionScores",
    "PropertyScore",
    "ReportRow",
    "RougeScores",
    "build_report",
    "evaluate_extraction",
    "evaluate_summaries",
    "render_report",
    "rouge_all",
    "rouge_l",
    "rouge_n",
]
