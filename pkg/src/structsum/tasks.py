"""Question-answering and NER reframings of the dataset, with their scorers.

QA: one question per (paper, property), ``what is the <property>?``, with
every exact, case-sensitive occurrence of a gold value in the cleaned text
as an answer span. NER: whitespace tokens tagged BIO with the property as
the entity class.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from structsum import codec
from structsum.errors import FormatError
from structsum.evaluation.rouge import f1_score
from structsum.evaluation.scoring import ExtractionScores, PropertyScore, counts_to_scores
from structsum.types import AnnotationRecord, TrainingExample

QUESTION_TEMPLATE = "what is the {}?"


def question_for(property_label: str) -> str:
    return QUESTION_TEMPLATE.format(property_label)


@dataclass(frozen=True)
class QAItem:
    paper_id: str
    property_label: str
    question: str
    context: str
    answers: tuple[tuple[str, int], ...]

    @property
    def is_answerable(self) -> bool:
        return bool(self.answers)

    @property
    def key(self) -> tuple[str, str]:
        return self.paper_id, self.property_label


@dataclass(frozen=True)
class NERDocument:
    paper_id: str
    tokens: tuple[str, ...]
    tags: tuple[str, ...]

    def __post_init__(self):
        if len(self.tokens) != len(self.tags):
            raise ValueError(f"{self.paper_id}: {len(self.tokens)} tokens but {len(self.tags)} tags")


def _records_by_id(
    examples: Sequence[TrainingExample], records: Sequence[AnnotationRecord] | None
) -> dict[str, list]:
    if records is None:
        # gold pairs are recoverable from the serialized targets
        return {e.paper_id: codec.parse(e.target_summary, tolerant=False).pairs for e in examples}
    return {r.paper_id: codec.normalize_pairs(r.pairs) for r in records}


def find_all(haystack: str, needle: str) -> list[int]:
    """Start offsets of every (possibly overlapping) occurrence."""
    out = []
    start = haystack.find(needle)
    while start != -1:
        out.append(start)
        start = haystack.find(needle, start + 1)
    return out


def to_qa_dataset(
    examples: Sequence[TrainingExample], records: Sequence[AnnotationRecord] | None = None
) -> list[QAItem]:
    pairs_by_id = _records_by_id(examples, records)
    items = []
    for ex in sorted(examples, key=lambda e: e.paper_id):
        for pair in pairs_by_id.get(ex.paper_id, ()):
            spans = {(v, s) for v in pair.values for s in find_all(ex.input_text, v)}
            answers = tuple(sorted(spans, key=lambda a: (a[1], a[0])))
            items.append(
                QAItem(ex.paper_id, pair.property_label, question_for(pair.property_label), ex.input_text, answers)
            )
    return items


def bio_tags(tokens: Sequence[str], pairs) -> list[str]:
    """Tag token-aligned value occurrences.

    Overlapping candidates are resolved greedily: longest span first, then
    earliest start, then smallest property label.
    """
    candidates = []
    for pair in pairs:
        for value in pair.values:
            vt = value.split()
            k = len(vt)
            for start in range(len(tokens) - k + 1):
                if list(tokens[start : start + k]) == vt:
                    candidates.append((-k, start, pair.property_label))
    tags = ["O"] * len(tokens)
    taken = [False] * len(tokens)
    for neg_k, start, label in sorted(candidates):
        span = range(start, start - neg_k)
        if any(taken[i] for i in span):
            continue
        for i in span:
            taken[i] = True
            tags[i] = ("B-" if i == start else "I-") + label
    return tags


def to_ner_dataset(
    examples: Sequence[TrainingExample], records: Sequence[AnnotationRecord] | None = None
) -> list[NERDocument]:
    pairs_by_id = _records_by_id(examples, records)
    docs = []
    for ex in sorted(examples, key=lambda e: e.paper_id):
        tokens = ex.input_text.split()
        docs.append(NERDocument(ex.paper_id, tuple(tokens), tuple(bio_tags(tokens, pairs_by_id.get(ex.paper_id, ())))))
    return docs


def is_well_formed_bio(tags: Sequence[str]) -> bool:
    prev = "O"
    for tag in tags:
        if tag.startswith("I-"):
            if prev[2:] != tag[2:] or prev == "O":
                return False
        elif tag != "O" and not tag.startswith("B-"):
            return False
        prev = tag
    return True


def entities(tags: Sequence[str]) -> set[tuple[int, int, str]]:
    """(start, end, class) spans; a stray ``I-X`` opens a new entity, as in conlleval."""
    spans = set()
    start, cls = None, None
    for i, tag in enumerate(list(tags) + ["O"]):
        kind, label = (tag[:1], tag[2:]) if tag != "O" else ("O", None)
        continues = kind == "I" and label == cls and start is not None
        if not continues and start is not None:
            spans.add((start, i, cls))
            start, cls = None, None
        if kind in ("B", "I") and not continues:
            start, cls = i, label
    return spans


# -- scoring ------------------------------------------------------------------


def token_prf(prediction: str, gold: str) -> tuple[float, float, float]:
    """Multiset token overlap between two answer strings (no normalization)."""
    p_tokens, g_tokens = prediction.split(), gold.split()
    common = sum((Counter(p_tokens) & Counter(g_tokens)).values())
    if common == 0:
        return 0.0, 0.0, 0.0
    p = common / len(p_tokens)
    r = common / len(g_tokens)
    return p, r, f1_score(p, r)


def score_qa_at1(predictions: Iterable[tuple[str, str, str]], gold: Sequence[QAItem]) -> ExtractionScores:
    """Macro token-level P/R/F1 of the top-ranked answer per question.

    Answerable items take the gold answer giving the best F1. Unanswerable
    items score 1 for an empty prediction and 0 otherwise; a missing
    prediction counts as empty.
    """
    by_key = {item.key: item for item in gold}
    top: dict[tuple[str, str], str] = {}
    for paper_id, prop, answer in predictions:
        key = (paper_id, prop)
        if key not in by_key:
            raise KeyError(f"prediction for unknown QA item {key}")
        top.setdefault(key, answer)  # first listed is the @1 candidate

    per_item: dict[tuple[str, str], tuple[float, float, float]] = {}
    for key, item in by_key.items():
        answer = top.get(key, "").strip()
        if not item.is_answerable:
            per_item[key] = (0.0, 0.0, 0.0) if answer else (1.0, 1.0, 1.0)
        elif not answer:
            per_item[key] = (0.0, 0.0, 0.0)
        else:
            per_item[key] = max((token_prf(answer, text) for text, _ in item.answers), key=lambda s: s[2])

    def mean(keys):
        n = len(keys)
        if not n:
            return 0.0, 0.0, 0.0
        return tuple(sum(per_item[k][i] for k in keys) / n for i in range(3))

    by_prop = defaultdict(list)
    for key in per_item:
        by_prop[key[1]].append(key)
    per_property = {
        label: PropertyScore(*mean(keys), support=len(keys)) for label, keys in sorted(by_prop.items())
    }
    return ExtractionScores(*mean(list(per_item)), per_property=per_property)


def score_ner(pred_docs: Sequence[NERDocument], gold_docs: Sequence[NERDocument]) -> ExtractionScores:
    """Entity-level micro P/R/F1 with exact boundaries and class."""
    pred_by_id = {d.paper_id: d for d in pred_docs}
    if set(pred_by_id) != {d.paper_id for d in gold_docs}:
        raise ValueError("prediction and gold documents cover different paper ids")
    counts: dict[str, list[int]] = defaultdict(lambda: [0, 0, 0])
    for g in gold_docs:
        p = pred_by_id[g.paper_id]
        if len(p.tags) != len(g.tags):
            raise ValueError(f"{g.paper_id}: {len(p.tags)} predicted tags vs {len(g.tags)} gold tags")
        pe, ge = entities(p.tags), entities(g.tags)
        for _, _, cls in pe & ge:
            counts[cls][0] += 1
        for _, _, cls in pe - ge:
            counts[cls][1] += 1
        for _, _, cls in ge - pe:
            counts[cls][2] += 1
    tp, fp, fn = (sum(c[i] for c in counts.values()) for i in range(3))
    per_property = {
        cls: PropertyScore(*counts_to_scores(*c), support=c[0] + c[2])
        for cls, c in sorted(counts.items())
        if c[0] + c[2]
    }
    return ExtractionScores(*counts_to_scores(tp, fp, fn), per_property=per_property, tp=tp, fp=fp, fn=fn)


# -- file formats -------------------------------------------------------------


def qa_to_squad(items: Sequence[QAItem]) -> dict:
    """SQuAD v2 layout; one article entry per paper, one paragraph per context."""
    data = []
    by_paper: dict[str, list[QAItem]] = {}
    for item in items:
        by_paper.setdefault(item.paper_id, []).append(item)
    for paper_id, group in by_paper.items():
        qas = [
            {
                "id": f"{paper_id}::{item.property_label}",
                "property": item.property_label,
                "question": item.question,
                "answers": [{"text": t, "answer_start": s} for t, s in item.answers],
                "is_impossible": not item.is_answerable,
            }
            for item in group
        ]
        data.append({"title": paper_id, "paragraphs": [{"context": group[0].context, "qas": qas}]})
    return {"version": "v2.0", "data": data}


def qa_from_squad(obj: dict) -> list[QAItem]:
    items = []
    try:
        for article in obj["data"]:
            for para in article["paragraphs"]:
                for qa in para["qas"]:
                    items.append(
                        QAItem(
                            article["title"],
                            qa["property"],
                            qa["question"],
                            para["context"],
                            tuple((a["text"], int(a["answer_start"])) for a in qa["answers"]),
                        )
                    )
    except (KeyError, TypeError) as exc:
        raise FormatError(f"not a SQuAD v2 file produced by convert-qa ({exc})") from None
    return items


def write_squad(items: Sequence[QAItem], path) -> None:
    Path(path).write_text(json.dumps(qa_to_squad(items), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def read_squad(path) -> list[QAItem]:
    try:
        return qa_from_squad(json.loads(Path(path).read_text(encoding="utf-8")))
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON ({exc.msg})", path) from None


def read_qa_predictions(path) -> list[tuple[str, str, str]]:
    """JSON Lines ``{"paper_id", "property", "answer"}``; file order is rank order."""
    out = []
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                d = json.loads(line)
                out.append((d["paper_id"], d["property"], d["answer"]))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise FormatError(f"invalid QA prediction ({exc})", path, lineno) from None
    return out


def write_conll(docs: Sequence[NERDocument], path) -> None:
    """``token<TAB>tag`` lines, ``# paper_id`` header, blank line between documents."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(f"# {doc.paper_id}\n")
            for tok, tag in zip(doc.tokens, doc.tags):
                fh.write(f"{tok}\t{tag}\n")
            fh.write("\n")


def read_conll(path) -> list[NERDocument]:
    docs = []
    paper_id, tokens, tags = None, [], []

    def flush():
        if paper_id is not None or tokens:
            docs.append(NERDocument(paper_id or f"doc{len(docs)}", tuple(tokens), tuple(tags)))

    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                flush()
                paper_id, tokens, tags = None, [], []
            elif line.startswith("# ") and not tokens:
                paper_id = line[2:]
            else:
                tok, sep, tag = line.partition("\t")
                if not sep:
                    raise FormatError("expected token<TAB>tag", path, lineno)
                tokens.append(tok)
                tags.append(tag)
    flush()
    return docs
