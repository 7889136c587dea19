"""Seeded synthetic corpora for tests, demos and smoke runs.

Articles carry their gold values inside prose sections, and can be salted
with the artifacts the cleaner must remove: URLs, non-ASCII characters,
citation markers, boilerplate sections and non-prose nodes.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from structsum.types import AnnotationRecord, ArticleText, NonProseNode, PropertyValuePair, Section

VALUE_POOLS = {
    "Study location": ["Singapore", "Berlin", "Nairobi", "Lima", "Osaka", "Hannover", "Quebec"],
    "Data size": ["139 meetings", "20 meetings", "4500 articles", "312 dialogues", "87 reports"],
    "Summarization type": ["Abstractive", "Extractive", "Hybrid"],
    "Evaluation metrics": ["ROUGE-2", "ROUGE-SU4", "F1", "BLEU", "METEOR", "Accuracy"],
    "Preprocessing steps": ["Topic segmentation", "Anaphora resolution", "Pronoun resolution", "Tokenization"],
    "Research problem": ["meeting summarization", "citation recommendation", "entity linking", "table parsing"],
}

TEMPLATES = {
    "Study location": "The study was carried out in {}.",
    "Data size": "The collection comprises {}.",
    "Summarization type": "Our approach is {} in nature.",
    "Evaluation metrics": "Results are reported with {}.",
    "Preprocessing steps": "The input is prepared using {}.",
    "Research problem": "This work addresses {}.",
}

FILLER = [
    "We describe the experimental setup in detail.",
    "The pipeline was run three times with different settings.",
    "Each component is evaluated separately.",
    "Observations are summarized at the end of the section.",
    "Several configurations were compared against each other.",
    "The method relies on a small number of parameters.",
]

URLS = ["https://example.org/data?id=7", "http://x.org/a", "ftp://files.example.net/pub", "www.example.com/page"]
NON_ASCII = ["naïve", "café", "Zürich", "résumé", "α-level", "\u2014", "\u201cquoted\u201d"]
CITATIONS = ["[12]", "[3,5]", "[1-4]", "(Lee et al., 2019)", "(Smith and Jones, 2020)", "(see Brown, 2018a)"]


def random_record(rng: random.Random, paper_id: str, n_pairs: int) -> AnnotationRecord:
    props = rng.sample(sorted(VALUE_POOLS), n_pairs)
    pairs = []
    for prop in props:
        k = 2 if prop in ("Evaluation metrics", "Preprocessing steps") and rng.random() < 0.5 else 1
        pairs.append(PropertyValuePair(prop, tuple(rng.sample(VALUE_POOLS[prop], k))))
    return AnnotationRecord(paper_id, tuple(pairs))


def _value_sentences(record: AnnotationRecord) -> list[str]:
    return [TEMPLATES[p.property_label].format(" and ".join(p.values)) for p in record.pairs]


def short_article(rng: random.Random, record: AnnotationRecord) -> ArticleText:
    body = _value_sentences(record)
    rng.shuffle(body)
    body.insert(rng.randrange(len(body) + 1), rng.choice(FILLER))
    return ArticleText(record.paper_id, (Section("Method", (" ".join(body),)),), title=f"Paper {record.paper_id}")


def noisy_article(rng: random.Random, record: AnnotationRecord, marker: str) -> ArticleText:
    """Full-structure article; removable sections carry ``marker`` tokens only."""
    value_sents = _value_sentences(record)

    def salted(sentence: str) -> str:
        words = sentence.split()
        pos = rng.randrange(len(words) + 1)
        junk = rng.choice([rng.choice(URLS), rng.choice(NON_ASCII), rng.choice(CITATIONS)])
        return " ".join(words[:pos] + [junk] + words[pos:])

    method = [salted(rng.choice(FILLER)), value_sents[0] + " " + rng.choice(CITATIONS)]
    results = [salted(s) if rng.random() < 0.3 else s for s in value_sents[1:]] + [salted(rng.choice(FILLER))]
    sections = (
        Section("Abstract", (f"{marker}abs summary of the work.",)),
        Section("1. Introduction", (salted(rng.choice(FILLER)), f"Details at {rng.choice(URLS)} and {rng.choice(NON_ASCII)}.")),
        Section("2 Related Work", (f"{marker}rw prior approaches {rng.choice(CITATIONS)}.",)),
        Section("III. Background", (f"{marker}bg definitions.",)),
        Section("3. Method", tuple(method)),
        Section("4. Results", tuple(results)),
        Section("Acknowledgements", (f"{marker}ack funding agency.",)),
        Section("REFERENCES", (f"{marker}ref [1] A. Author. Title. 2019.",)),
    )
    non_prose = (
        NonProseNode("table", f"{marker}tab 1 2 3"),
        NonProseNode("figure", f"{marker}fig caption"),
        NonProseNode("footnote", f"{marker}fn https://footnote.example"),
    )
    return ArticleText(record.paper_id, sections, non_prose, title=f"Paper {record.paper_id}", extraction_tool="synthetic")


def make_corpus(n: int, seed: int = 0, short: bool = False, marker: str = "zzremoved"):
    """Return (records, articles) for ``n`` papers with 2-3 pairs each."""
    rng = random.Random(seed)
    records, articles = [], []
    for i in range(n):
        record = random_record(rng, f"P{i:04d}", rng.choice([2, 3]))
        records.append(record)
        articles.append(short_article(rng, record) if short else noisy_article(rng, record, marker))
    return records, articles


def snapshot_lines(records) -> list[dict]:
    return [
        {"paper_id": r.paper_id, "property_label": p.property_label, "value": v}
        for r in records
        for p in r.pairs
        for v in p.values
    ]


def write_corpus(directory, records, articles, extra_statements=()) -> tuple[Path, Path]:
    """Write ``snapshot.jsonl`` and ``texts/<paper_id>.json``; returns both paths."""
    d = Path(directory)
    texts = d / "texts"
    texts.mkdir(parents=True, exist_ok=True)
    snapshot = d / "snapshot.jsonl"
    with snapshot.open("w", encoding="utf-8") as fh:
        for line in list(snapshot_lines(records)) + list(extra_statements):
            fh.write(json.dumps(line, ensure_ascii=False) + "\n")
    for a in articles:
        (texts / f"{a.paper_id}.json").write_text(json.dumps(a.to_dict(), ensure_ascii=False, indent=1), encoding="utf-8")
    return snapshot, texts
