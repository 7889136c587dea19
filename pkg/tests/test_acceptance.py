"""Acceptance suite: one test per primary criterion.

Each test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL/SKIP line per criterion.
"""

import json
import random
import string
import time

import pytest

from oracles import rouge_l_oracle, rouge_n_oracle
from structsum import codec, synthetic
from structsum.cleaning import clean_article, clean_text
from structsum.cli import main
from structsum.corpus import pair_corpus, split_dataset, split_sizes
from structsum.evaluation import rouge_all, rouge_l, rouge_n
from structsum.summarizer import SummarizerConfig, fit, generate, neural_available
from structsum.tasks import is_well_formed_bio, to_ner_dataset, to_qa_dataset, token_prf
from structsum.types import AnnotationRecord, PropertyValuePair as PV, TrainingExample


def cli(*argv):
    return main([str(a) for a in argv])


@pytest.mark.criterion("ROUGE oracle equivalence (1000 pairs, 1e-9, <10 s)")
def test_rouge_oracle_equivalence():
    rng = random.Random(2024)
    vocab = [f"w{i}" for i in range(10)]
    start = time.perf_counter()
    for _ in range(1000):
        c = [rng.choice(vocab) for _ in range(rng.randint(0, 20))]
        r = [rng.choice(vocab) for _ in range(rng.randint(0, 20))]
        cs, rs = " ".join(c), " ".join(r)
        for n in (1, 2):
            got = rouge_n(cs, rs, n)
            assert (got.precision, got.recall, got.f1) == pytest.approx(rouge_n_oracle(c, r, n), abs=1e-9)
        got = rouge_l(cs, rs)
        assert (got.precision, got.recall, got.f1) == pytest.approx(rouge_l_oracle(c, r), abs=1e-9)
    assert time.perf_counter() - start < 10


@pytest.mark.criterion("hand-derived ROUGE fixtures")
def test_rouge_hand_fixture():
    s = rouge_all("the cat sat", "the cat ran")
    assert s.rouge1.f1 == pytest.approx(2 / 3, abs=1e-12)
    assert s.rouge2.f1 == pytest.approx(1 / 2, abs=1e-12)
    assert s.rougeL.f1 == pytest.approx(2 / 3, abs=1e-12)


def _random_field(rng):
    alphabet = string.printable[:95]
    pieces = [rng.choice(["::", "|", ";", " ", "".join(rng.choices(alphabet, k=rng.randint(0, 8)))]) for _ in range(rng.randint(1, 5))]
    return "".join(pieces)


@pytest.mark.criterion("codec round-trip (1000 records) and total tolerant parse (1000 strings, <5 s)")
def test_codec_round_trip():
    rng = random.Random(7)
    start = time.perf_counter()
    checked = 0
    while checked < 1000:
        pairs = [PV(_random_field(rng), tuple(_random_field(rng) for _ in range(rng.randint(1, 4)))) for _ in range(rng.randint(1, 5))]
        expected = codec.escape_pairs(pairs)
        if not expected:
            continue
        record = AnnotationRecord(f"r{checked}", tuple(pairs))
        parsed = codec.parse(codec.serialize(record), tolerant=False)
        assert codec.normalize_pairs(parsed.pairs) == expected
        checked += 1
    noise_alphabet = string.printable + ":::|||;;;é"
    for _ in range(1000):
        text = "".join(rng.choices(noise_alphabet, k=rng.randint(0, 120)))
        codec.parse(text, tolerant=True)
    assert time.perf_counter() - start < 5


@pytest.mark.criterion("cleaner removes every planted artifact and is idempotent (50 docs)")
def test_cleaner_invariants():
    marker = "zzplanted"
    records, articles = synthetic.make_corpus(50, seed=99, marker=marker)
    planted = [u for u in synthetic.URLS] + ["://", "www."] + [c for c in synthetic.CITATIONS]
    for record, article in zip(records, articles):
        text = clean_article(article)
        assert text.isascii()
        assert marker not in text
        for artifact in planted:
            assert artifact not in text
        assert "[" not in text and "(" not in text
        assert clean_text(text) == text
        words = {w.strip(".,") for w in text.split()}
        for pair in record.pairs:
            for value in pair.values:
                assert set(value.split()) <= words


@pytest.mark.criterion("split law for N in 1..500")
def test_split_law():
    for n in range(1, 501):
        examples = [TrainingExample.build(f"p{i}", "t", "A :: b") for i in range(n)]
        split = split_dataset(examples, seed=n)
        sizes = (len(split.train), len(split.validation), len(split.test))
        assert sizes == split_sizes(n) == (8 * n // 10, n // 10, n - 8 * n // 10 - n // 10)
        ids = [e.paper_id for part in (split.train, split.validation, split.test) for e in part]
        assert sorted(ids) == sorted(e.paper_id for e in examples)
        again = split_dataset(examples, seed=n)
        assert [e.paper_id for e in again.train] == [e.paper_id for e in split.train]
        assert [e.paper_id for e in again.test] == [e.paper_id for e in split.test]


@pytest.mark.criterion("end-to-end oracle identity and linking through the CLI (<30 s)")
def test_end_to_end_oracle(tmp_path):
    start = time.perf_counter()
    records, articles = synthetic.make_corpus(20, seed=21)
    synthetic.write_corpus(tmp_path, records, articles)
    ds = tmp_path / "ds" / "dataset.jsonl"
    assert cli("build-dataset", "--snapshot", tmp_path / "snapshot.jsonl", "--texts", tmp_path / "texts", "--out", ds) == 0
    assert cli("split", "--dataset", ds, "--seed", 1) == 0
    # The full dataset is predicted so every paper goes through the pipeline.
    assert cli("predict", "--backend", "oracle", "--data", ds, "--out", tmp_path / "pred.jsonl") == 0
    assert cli("parse", "--strict", "--predictions", tmp_path / "pred.jsonl", "--out", tmp_path / "parsed.jsonl") == 0
    assert cli("evaluate", "--predictions", tmp_path / "pred.jsonl", "--gold", ds, "--out", tmp_path / "rep") == 0
    report = json.loads((tmp_path / "rep.json").read_text())
    assert report["n_examples"] == 20
    for key in ("rouge1", "rouge2", "rougeL"):
        assert report["rouge"][key]["f1"] == 1.0
    assert report["extraction"]["f1"] == 1.0

    values = sorted({v for r in records for p in r.pairs for v in p.values})
    covered = set(values[::2])
    with (tmp_path / "catalog.jsonl").open("w") as fh:
        for i, v in enumerate(sorted(covered)):
            fh.write(json.dumps({"entity_id": f"E{i}", "label": v.upper()}) + "\n")
    assert cli("link", "--parsed", tmp_path / "parsed.jsonl", "--catalog", tmp_path / "catalog.jsonl", "--out", tmp_path / "st.jsonl") == 0
    statements = [json.loads(line) for line in (tmp_path / "st.jsonl").read_text().splitlines()]
    expected = [(r.paper_id, p.property_label, v) for r in records for p in r.pairs for v in p.values]
    assert len(statements) == len(expected)
    entity_of = {v: f"E{i}" for i, v in enumerate(sorted(covered))}
    got = sorted((s["subject"], s["predicate"], s["object"], s["object_kind"]) for s in statements)
    want = sorted(
        (pid, prop, entity_of[v], "entity") if v in covered else (pid, prop, v, "literal") for pid, prop, v in expected
    )
    assert got == want
    assert time.perf_counter() - start < 30


@pytest.mark.criterion("converter soundness and QA token-F1 fixture")
def test_converter_soundness():
    records, articles = synthetic.make_corpus(40, seed=3)
    examples = pair_corpus(records, articles).examples
    qa = to_qa_dataset(examples)
    answerable = [q for q in qa if q.is_answerable]
    assert answerable
    for item in answerable:
        for text, offset in item.answers:
            assert item.context[offset : offset + len(text)] == text
    docs = to_ner_dataset(examples)
    assert docs and all(is_well_formed_bio(d.tags) for d in docs)
    assert any(t != "O" for d in docs for t in d.tags)
    assert token_prf("The City of Singapore", "Singapore")[2] == pytest.approx(0.4, abs=1e-12)


@pytest.mark.slow
@pytest.mark.skipif(not neural_available(), reason="no ML runtime installed")
@pytest.mark.criterion("trainable backend overfits 20 short examples to ROUGE-1 >= 0.9")
def test_neural_overfit():
    records, articles = synthetic.make_corpus(20, seed=1, short=True)
    examples = pair_corpus(records, articles).examples
    assert len(examples) == 20
    config = SummarizerConfig(batch_size=2, max_epochs=20, max_output_tokens=64, seed=0)
    start = time.perf_counter()
    model = fit(examples, examples, config)
    assert len(model.training_log) <= 20
    scores = [rouge_all(generate(model, ex.input_text), ex.target_summary).rouge1.f1 for ex in examples]
    mean = sum(scores) / len(scores)
    print(f"train-set ROUGE-1 F1 = {mean:.4f} after {len(model.training_log)} epochs")
    assert mean >= 0.9
    assert time.perf_counter() - start < 15 * 60


@pytest.mark.criterion("directional check on a real corpus of >= 500 examples (non-gating)")
@pytest.mark.skip(reason="non-gating: needs a real paired corpus of >= 500 examples, none ships with the package")
def test_directional_real_corpus():
    pass
