"""Command-line entry point: one subcommand per pipeline stage.

Stages exchange files only, so each can run on its own (and the neural stages
on different hardware). Settings come from an optional JSON config file;
command-line flags win over it.

Exit codes: 0 success, 1 unexpected, 2 usage, 3 config / missing input,
4 file-format violation, 5 summary parse failure, 6 backend capability,
7 empty corpus.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from structsum import codec, corpus, linker, tasks
from structsum.cleaning import CleaningConfig, clean_article
from structsum.errors import ConfigError, FormatError, StructSumError
from structsum.evaluation.report import build_report, load_report, render_report, to_markdown
from structsum.summarizer import (
    LeadBaseline,
    OracleBackend,
    SummarizerConfig,
    fit,
    generate,
    load_backend,
)

logger = logging.getLogger("structsum")

EXIT_CODES = {
    "error": 1,
    "config": 3,
    "format": 4,
    "parse": 5,
    "capability": 6,
    "empty-corpus": 7,
}

PATH_KEYS = ("snapshot", "texts", "dataset_dir", "catalog", "checkpoints", "reports")


# -- config -------------------------------------------------------------------


def load_config(path) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        cfg = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: invalid JSON ({exc.msg})") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{p}: top level must be an object")
    unknown = set(cfg) - {"seed", "paths", "cleaning", "summarizer", "property_blocklist"}
    if unknown:
        raise ConfigError(f"{p}: unknown config keys {sorted(unknown)}")
    unknown = set(cfg.get("paths", {})) - set(PATH_KEYS)
    if unknown:
        raise ConfigError(f"{p}: unknown path keys {sorted(unknown)}")
    return cfg


def _resolve(args, cfg: dict, flag: str, path_key: str | None = None, default=None):
    value = getattr(args, flag, None)
    if value is not None:
        return value
    if path_key is not None and path_key in cfg.get("paths", {}):
        return cfg["paths"][path_key]
    if default is not None:
        return default
    raise ConfigError(f"missing --{flag.replace('_', '-')} (or paths.{path_key} in the config)")


def _existing(path, what: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"{what} not found: {p}")
    return p


def _seed(args, cfg) -> int:
    return args.seed if args.seed is not None else int(cfg.get("seed", 0))


def _cleaning(cfg) -> CleaningConfig:
    return CleaningConfig.from_dict(cfg.get("cleaning", {}))


def _summarizer_config(args, cfg, **overrides) -> SummarizerConfig:
    d = dict(cfg.get("summarizer", {}))
    d.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return SummarizerConfig.from_dict(d)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def _write_json(path, obj) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(obj, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def _read_jsonl(path, required: tuple[str, ...]) -> list[dict]:
    out = []
    with _existing(path, "input file").open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                d = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid JSON ({exc.msg})", path, lineno) from None
            if not isinstance(d, dict) or any(k not in d for k in required):
                raise FormatError(f"expected keys {list(required)}", path, lineno)
            out.append(d)
    return out


def _write_jsonl(path, rows) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with Path(path).open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def read_predictions(path) -> list[tuple[str, str]]:
    return [(d["paper_id"], d["prediction"]) for d in _read_jsonl(path, ("paper_id", "prediction"))]


# -- subcommands --------------------------------------------------------------


def cmd_build_dataset(args, cfg) -> int:
    snapshot = _existing(_resolve(args, cfg, "snapshot", "snapshot"), "snapshot")
    texts_dir = _existing(_resolve(args, cfg, "texts", "texts"), "texts directory")
    out = Path(args.out or Path(_resolve(args, cfg, "dataset_dir", "dataset_dir")) / "dataset.jsonl")
    blocklist = args.blocklist if args.blocklist is not None else cfg.get("property_blocklist", [])
    cleaning = _cleaning(cfg)

    records = corpus.load_kg_snapshot(snapshot, blocklist)
    articles = corpus.load_articles(texts_dir)
    result = corpus.pair_corpus(records, articles, lambda a: clean_article(a, cleaning))
    out.parent.mkdir(parents=True, exist_ok=True)
    corpus.write_examples(result.examples, out)
    manifest = {
        "seed": _seed(args, cfg),
        "n_records": len(records),
        "n_articles": len(articles),
        "n_examples": len(result.examples),
        "unmatched_ids": result.unmatched_ids,
        "empty_text_ids": result.empty_text_ids,
        "property_blocklist": list(blocklist),
        "cleaning": cleaning.to_dict(),
        "stats": corpus.corpus_stats(result.examples).to_dict(),
    }
    _write_json(out.with_name(out.stem + ".manifest.json"), manifest)
    if result.unmatched_ids:
        print(f"warning: {len(result.unmatched_ids)} record(s) without article text", file=sys.stderr)
    print(f"{len(result.examples)} examples -> {out}")
    return 0


def cmd_split(args, cfg) -> int:
    dataset = args.dataset or Path(_resolve(args, cfg, "dataset_dir", "dataset_dir")) / "dataset.jsonl"
    dataset = _existing(dataset, "dataset")
    prefix = args.out_prefix or str(Path(dataset).with_suffix(""))
    split = corpus.split_dataset(corpus.read_examples(dataset), _seed(args, cfg))
    manifest = corpus.write_split(split, prefix)
    c = manifest["counts"]
    print(f"train={c['train']} validation={c['validation']} test={c['test']} seed={manifest['seed']}")
    return 0


def cmd_clean(args, cfg) -> int:
    article = corpus.load_article(_existing(args.article, "article"))
    text = clean_article(article, _cleaning(cfg))
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def cmd_train(args, cfg) -> int:
    train = corpus.read_examples(_existing(args.train, "training set"))
    validation = corpus.read_examples(_existing(args.validation, "validation set")) if args.validation else []
    checkpoint_dir = _resolve(args, cfg, "checkpoint_dir", "checkpoints")
    config = _summarizer_config(
        args,
        cfg,
        backend=args.backend,
        checkpoint_dir=str(checkpoint_dir),
        seed=args.seed if args.seed is not None else cfg.get("seed"),
        max_epochs=args.epochs,
        batch_size=args.batch_size,
        max_input_tokens=args.max_input_tokens,
    )
    if config.backend == "lead_baseline":
        LeadBaseline.from_examples(train, config.max_input_tokens).save(checkpoint_dir)
        _write_json(Path(checkpoint_dir) / "config.json", config.to_dict())
        print(f"lead baseline -> {checkpoint_dir}")
        return 0
    model = fit(train, validation, config)
    last = model.training_log[-1]
    print(f"trained {len(model.training_log)} epoch(s); last validation_loss={last.validation_loss:.4f} -> {checkpoint_dir}")
    return 0


def cmd_predict(args, cfg) -> int:
    examples = corpus.read_examples(_existing(args.data, "dataset"))
    backend_name = args.backend or cfg.get("summarizer", {}).get("backend", "neural")
    checkpoint_dir = args.checkpoint_dir or cfg.get("paths", {}).get("checkpoints")
    backend = load_backend(backend_name, checkpoint_dir)
    rows = []
    for ex in examples:
        gold = ex if isinstance(backend, OracleBackend) else None
        rows.append({"paper_id": ex.paper_id, "prediction": generate(backend, ex.input_text, gold)})
    _write_jsonl(args.out, rows)
    print(f"{len(rows)} predictions ({backend_name}) -> {args.out}")
    return 0


def cmd_parse(args, cfg) -> int:
    rows = []
    for pid, text in read_predictions(args.predictions):
        s = codec.parse(text, tolerant=args.tolerant)
        rows.append(
            {
                "paper_id": pid,
                "pairs": codec.pairs_to_json(s.pairs),
                "malformed_segments": s.malformed_segments,
                "parse_complete": s.parse_complete,
            }
        )
    _write_jsonl(args.out, rows)
    n_bad = sum(not r["parse_complete"] for r in rows)
    print(f"{len(rows)} summaries parsed ({n_bad} with malformed segments) -> {args.out}")
    return 0


def read_parsed(path):
    from structsum.types import StructuredSummary

    out = []
    for d in _read_jsonl(path, ("paper_id", "pairs")):
        try:
            pairs = codec.pairs_from_json(d["pairs"])
        except (KeyError, TypeError) as exc:
            raise FormatError(f"invalid pairs for {d['paper_id']} ({exc})", path) from None
        out.append((d["paper_id"], StructuredSummary("", pairs, list(d.get("malformed_segments", [])))))
    return out


def cmd_link(args, cfg) -> int:
    catalog = linker.load_catalog(_existing(_resolve(args, cfg, "catalog", "catalog"), "catalog"))
    for w in catalog.warnings:
        print(f"warning: {w}", file=sys.stderr)
    statements = []
    for pid, summary in read_parsed(args.parsed):
        statements.extend(linker.link(summary, pid, catalog))
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    linker.emit_statements(statements, args.out, args.format)
    n_entity = sum(s.object_kind == "entity" for s in statements)
    print(f"{len(statements)} statements ({n_entity} linked, {len(statements) - n_entity} literal) -> {args.out}")
    return 0


def cmd_evaluate(args, cfg) -> int:
    out = Path(args.out or Path(_resolve(args, cfg, "reports", "reports")) / f"{args.task}_report")
    if args.task == "summary":
        gold = corpus.read_examples(_existing(args.gold, "gold dataset"))
        try:
            report = build_report(read_predictions(args.predictions), gold, lowercase=args.lowercase)
        except KeyError as exc:
            raise FormatError(str(exc.args[0])) from None
        json_path, _ = render_report(report, out)
        if report.missing_predictions:
            print(
                f"warning: {len(report.missing_predictions)} example(s) without prediction scored as zero",
                file=sys.stderr,
            )
        r = report.rouge
        print(
            f"rouge1={r.rouge1.f1:.4f} rouge2={r.rouge2.f1:.4f} rougeL={r.rougeL.f1:.4f} "
            f"extraction_f1={report.extraction.f1:.4f} -> {json_path}"
        )
        return 0

    if args.task == "qa":
        gold_items = tasks.read_squad(_existing(args.gold, "SQuAD file"))
        try:
            scores = tasks.score_qa_at1(tasks.read_qa_predictions(_existing(args.predictions, "predictions")), gold_items)
        except KeyError as exc:
            raise FormatError(str(exc.args[0])) from None
    else:
        gold_docs = tasks.read_conll(_existing(args.gold, "CoNLL file"))
        try:
            scores = tasks.score_ner(tasks.read_conll(_existing(args.predictions, "predictions")), gold_docs)
        except ValueError as exc:
            raise FormatError(str(exc)) from None
    path = out.with_name(out.name + ".json") if out.suffix != ".json" else out
    _write_json(path, {"task": args.task, **scores.to_dict()})
    print(f"precision={scores.precision:.4f} recall={scores.recall:.4f} f1={scores.f1:.4f} -> {path}")
    return 0


def cmd_convert_qa(args, cfg) -> int:
    items = tasks.to_qa_dataset(corpus.read_examples(_existing(args.dataset, "dataset")))
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    tasks.write_squad(items, args.out)
    n_ans = sum(i.is_answerable for i in items)
    print(f"{len(items)} questions ({n_ans} answerable) -> {args.out}")
    return 0


def cmd_convert_ner(args, cfg) -> int:
    docs = tasks.to_ner_dataset(corpus.read_examples(_existing(args.dataset, "dataset")))
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    tasks.write_conll(docs, args.out)
    print(f"{len(docs)} documents -> {args.out}")
    return 0


def cmd_report(args, cfg) -> int:
    try:
        report = load_report(_existing(args.report, "report"))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise FormatError(f"not an evaluation report ({exc})", args.report) from None
    md = to_markdown(report)
    if args.out:
        Path(args.out).write_text(md, encoding="utf-8")
    else:
        print(md, end="")
    return 0


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON pipeline config (flags override it)")
    common.add_argument("--seed", type=int, help="random seed (default: config seed or 0)")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = argparse.ArgumentParser(prog="structsum", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help):
        p = sub.add_parser(name, parents=[common], help=help, description=help)
        p.set_defaults(func=func)
        return p

    p = add("build-dataset", cmd_build_dataset, "pair KG annotations with cleaned article texts")
    p.add_argument("--snapshot", help="KG statements, JSON Lines")
    p.add_argument("--texts", help="directory of article JSON files")
    p.add_argument("--dataset-dir", help="output directory (dataset.jsonl)")
    p.add_argument("--out", help="explicit dataset JSONL path")
    p.add_argument("--blocklist", action="append", help="property label to exclude (repeatable)")

    p = add("split", cmd_split, "seeded 80/10/10 train/validation/test split")
    p.add_argument("--dataset", help="dataset JSONL (default: <dataset_dir>/dataset.jsonl)")
    p.add_argument("--dataset-dir", help="directory holding dataset.jsonl")
    p.add_argument("--out-prefix", help="output prefix (default: dataset path without suffix)")

    p = add("clean", cmd_clean, "clean one article JSON file to plain text")
    p.add_argument("--article", required=True, help="article JSON file")
    p.add_argument("--out", help="write here instead of stdout")

    p = add("train", cmd_train, "fit a summarizer backend")
    p.add_argument("--train", required=True, help="training split JSONL")
    p.add_argument("--validation", help="validation split JSONL")
    p.add_argument("--backend", choices=["neural", "lead_baseline"], help="default: config or neural")
    p.add_argument("--checkpoint-dir", help="where to write the checkpoint")
    p.add_argument("--epochs", type=int, help="maximum epochs")
    p.add_argument("--batch-size", type=int)
    p.add_argument("--max-input-tokens", type=int)

    p = add("predict", cmd_predict, "generate structured summaries")
    p.add_argument("--data", required=True, help="dataset JSONL to summarize")
    p.add_argument("--backend", choices=["neural", "oracle", "lead_baseline"])
    p.add_argument("--checkpoint-dir")
    p.add_argument("--out", required=True, help="predictions JSONL")

    p = add("parse", cmd_parse, "parse predicted summaries into property-value pairs")
    p.add_argument("--predictions", required=True)
    p.add_argument("--out", required=True, help="parsed summaries JSONL")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--tolerant", dest="tolerant", action="store_true", default=True, help="skip malformed segments (default)")
    mode.add_argument("--strict", dest="tolerant", action="store_false", help="fail on the first malformed segment")

    p = add("link", cmd_link, "link parsed values to catalog entities and emit statements")
    p.add_argument("--parsed", required=True, help="output of `parse`")
    p.add_argument("--catalog", help="entity catalog JSON Lines")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["jsonl", "ntriples_like"], default="jsonl")

    p = add("evaluate", cmd_evaluate, "score predictions against gold data")
    p.add_argument("--task", choices=["summary", "qa", "ner"], default="summary")
    p.add_argument("--predictions", required=True, help="summary/QA predictions JSONL or NER CoNLL file")
    p.add_argument("--gold", required=True, help="gold dataset JSONL, SQuAD file, or CoNLL file")
    p.add_argument("--out", help="report path prefix")
    p.add_argument("--reports", help="report directory when --out is not given")
    p.add_argument("--lowercase", action="store_true", help="case-insensitive ROUGE")

    p = add("convert-qa", cmd_convert_qa, "write the QA framing (SQuAD v2 JSON)")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)

    p = add("convert-ner", cmd_convert_ner, "write the NER framing (CoNLL token<TAB>tag)")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)

    p = add("report", cmd_report, "render an evaluation report JSON as Markdown")
    p.add_argument("--report", required=True)
    p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except StructSumError as exc:
        print(f"structsum: error[{exc.category}]: {exc}", file=sys.stderr)
        return EXIT_CODES.get(exc.category, 1)
    except OSError as exc:
        print(f"structsum: error[io]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
