"""Command-line front end: ``edsa <command> [flags]``.

Commands run one stage each and read the previous stage's output from
``work_dir``. Every artifact carries the hash of the config that produced it
and every run leaves a manifest under ``work_dir/manifests``.

Exit codes: 0 success, 1 failure, 2 bad config or usage, 3 missing input,
4 model/vocabulary hash mismatch. Errors are one JSON line on stderr.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .classifiers import HashMismatch, ModelName, SentimentPipeline, train_pipeline
from .config import DATA_ENV, SOURCE_FILE, Config, ConfigError, describe
from .corpus import Corpus, dump_jsonl, load_jsonl, parse_csv, stratified_subsets
from .ensemble import detect_events, run_edsa
from .evaluation import CSV_COLUMNS, ensemble_trainer, kfold, metrics_csv, model_trainer
from .events import Event, Method, events_to_json, format_table
from .preprocess import Pipeline, PipelineSpec, TokenizedDoc, apply_all
from .seeding import derive_seed
from .vectorize import Scheme, build_matrix, load_embeddings, transform

log = logging.getLogger("edsa")

COMMANDS = ("ingest", "preprocess", "vectorize", "detect-events", "train", "evaluate", "ensemble", "report")
EXIT_FAIL, EXIT_USAGE, EXIT_MISSING, EXIT_HASH = 1, 2, 3, 4


class MissingInput(FileNotFoundError):
    pass


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- helpers


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _dataset_key(dataset: str) -> str:
    if dataset in ("c1", "c2", "c3"):
        return dataset
    stem = Path(dataset).stem
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in stem) or "custom"


def _split(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


class Run:
    """One command invocation: resolved config, paths and produced artifacts."""

    def __init__(self, command: str, cfg: Config, argv: list[str], out: str | None):
        self.command = command
        self.cfg = cfg
        self.argv = argv
        self.hash = cfg.digest()
        self.key = _dataset_key(cfg.dataset)
        self.work = Path(cfg.work_dir)
        self.models = Path(out) if out and command == "train" else Path(cfg.model_dir)
        self.reports = Path(out) if out and command not in ("train",) else Path(cfg.report_dir)
        self.out = Path(out) if out else None
        self.artifacts: list[Path] = []
        self.started = time.time()

    def work_path(self, name: str) -> Path:
        base = self.out if self.out and self.command in ("ingest", "preprocess", "vectorize") else self.work
        base.mkdir(parents=True, exist_ok=True)
        return base / name

    def report_path(self, name: str) -> Path:
        self.reports.mkdir(parents=True, exist_ok=True)
        return self.reports / name

    def model_path(self, model: str, pipeline: str) -> Path:
        return self.models / f"{model}-{pipeline}-{self.key}.edsa"

    def produced(self, path: Path) -> Path:
        self.artifacts.append(path)
        return path

    def require(self, path: Path, hint: str) -> Path:
        if not path.exists():
            raise MissingInput(f"{path} not found; {hint}")
        return path

    def corpus(self) -> Corpus:
        path = self.require(self.work / f"corpus-{self.key}.jsonl", f"run `edsa ingest --dataset {self.cfg.dataset}`")
        return load_jsonl(path)

    def write_manifest(self) -> Path:
        mdir = self.work / "manifests"
        mdir.mkdir(parents=True, exist_ok=True)
        tag = self.key
        if self.command in ("preprocess", "vectorize"):
            tag = f"{self.key}-{self.cfg.pipeline}"
        elif self.command == "detect-events":
            tag = f"{self.key}-{self.cfg.method}"
        elif self.command in ("train", "evaluate"):
            tag = f"{self.key}-{self.cfg.model}-{self.cfg.pipeline}"
        path = mdir / f"{self.command}-{tag}.json"
        manifest = {
            "command": self.command,
            "argv": self.argv,
            "config_hash": self.hash,
            "config": self.cfg.as_dict(),
            "seed": self.cfg.seed,
            "versions": versions(),
            "wall_time": round(time.time() - self.started, 3),
            "artifacts": [{"path": str(p), "sha256": _sha256(p)} for p in self.artifacts],
        }
        path.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8")
        return path


def versions() -> dict:
    import numba
    import scipy

    return {"edsa": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__, "numba": numba.__version__}


def _event_params(cfg: Config, method: Method) -> dict:
    if method is Method.MABED:
        return {"min_support": cfg.mabed_min_support, "pool": cfg.mabed_pool, "dedup": cfg.dedup}
    if method is Method.OLDA:
        return {"K": cfg.olda_topics, "iters": cfg.olda_iters, "mix": cfg.olda_mix,
                "alpha": cfg.olda_alpha or None, "beta": cfg.olda_beta, "min_docs": cfg.olda_min_docs,
                "dedup": cfg.dedup}
    return {"sub_bins": cfg.peaky_sub_bins, "z_thresh": cfg.peaky_z, "dedup": cfg.dedup}


def _hyperparams(cfg: Config, model: ModelName) -> dict:
    if model is ModelName.NB:
        return {"alpha": cfg.nb_alpha}
    if model is ModelName.LR:
        return {"lr": cfg.lr_lr, "epochs": cfg.lr_epochs}
    if model is ModelName.RC:
        return {"lr": cfg.rc_lr, "epochs": cfg.rc_epochs, "lam": cfg.rc_lam}
    if model is ModelName.SVM:
        return {"C": cfg.svm_c, "epochs": cfg.svm_epochs}
    if model is ModelName.SOFTMAX:
        return {"lr": cfg.softmax_lr, "epochs": cfg.softmax_epochs}
    return {"hidden": cfg.lstm_hidden, "epochs": cfg.lstm_epochs, "lr": cfg.lstm_lr, "max_len": cfg.lstm_max_len,
            "batch_size": cfg.lstm_batch, "clip": cfg.lstm_clip, "tune_embeddings": cfg.lstm_tune_embeddings}


def _cbow_params(cfg: Config) -> dict:
    return {"dim": cfg.cbow_dim, "window": cfg.cbow_window, "epochs": cfg.cbow_epochs,
            "negatives": cfg.cbow_negatives, "lr": cfg.cbow_lr}


def _train_kwargs(cfg: Config, model: ModelName) -> dict:
    kw = {}
    if model.uses_cbow:
        kw["cbow_params"] = _cbow_params(cfg)
    if model is ModelName.SOFTMAX and cfg.embeddings:
        path = cfg.data_path(cfg.embeddings)
        if not path.exists():
            raise MissingInput(f"embeddings file {path} not found")
        kw["embeddings"] = load_embeddings(path)
    return kw


def _term_weight(model: str, cfg: Config) -> str:
    if model == "edsa":
        return "mixed"
    name = ModelName(model)
    if name.scheme is not None:
        return name.scheme.value
    return "external" if name is ModelName.SOFTMAX and cfg.embeddings else "cbow"


def _load_model(run: Run, model: str, pipeline: str) -> SentimentPipeline:
    path = run.require(run.model_path(model, pipeline),
                       f"run `edsa train --model {model} --pipeline {pipeline} --dataset {run.cfg.dataset}`")
    emb = None
    if model == "softmax" and run.cfg.embeddings:
        emb = load_embeddings(run.require(run.cfg.data_path(run.cfg.embeddings), "check the embeddings key"))
    return SentimentPipeline.load(path, embeddings=emb)


def _load_events(path: Path) -> list[Event]:
    obj = json.loads(path.read_text(encoding="utf-8"))
    return [Event.from_json(e) for e in obj["events"]]


# ---------------------------------------------------------------- commands


def cmd_ingest(run: Run) -> None:
    cfg = run.cfg
    if cfg.dataset in ("c1", "c2", "c3"):
        if not cfg.corpus and not os.environ.get(DATA_ENV):
            raise MissingInput(f"set {DATA_ENV} to the directory holding {SOURCE_FILE}, or the corpus key")
        source = cfg.source_csv()
    else:
        source = cfg.data_path(cfg.dataset)
    if not source.exists():
        raise MissingInput(f"corpus file {source} not found")
    full, report = parse_csv(source)
    if cfg.dataset in ("c1", "c2"):
        size = cfg.c1_size if cfg.dataset == "c1" else cfg.c2_size
        corpus = stratified_subsets(full, [size], derive_seed(cfg.seed, "subsets"))[0]
    else:
        corpus = full
    header = {"config_hash": run.hash, "dataset": cfg.dataset, "source": source.name,
              "rows": report.rows, "parsed": report.parsed, "malformed": report.malformed,
              "duplicates": report.duplicates, "tweets": len(corpus)}
    dump_jsonl(corpus, run.produced(run.work_path(f"corpus-{run.key}.jsonl")), header=header)


def _docs(run: Run, corpus: Corpus, pipeline: str) -> list[TokenizedDoc]:
    """Token dump for ``pipeline`` if preprocess wrote one for this corpus, else computed."""
    path = run.work / f"tokens-{run.key}-{pipeline}.jsonl"
    if path.exists():
        with open(path, encoding="utf-8") as fh:
            objs = [json.loads(line) for line in fh if line.strip()]
        docs = [TokenizedDoc.from_json(o) for o in objs if "header" not in o]
        if [d.tweet_id for d in docs] == corpus.ids:
            return docs
    return apply_all(corpus, PipelineSpec.resolve(pipeline))


def cmd_preprocess(run: Run) -> None:
    corpus = run.corpus()
    spec = PipelineSpec.resolve(run.cfg.pipeline)
    path = run.produced(run.work_path(f"tokens-{run.key}-{spec.name.value}.jsonl"))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"header": {"config_hash": run.hash, "pipeline": spec.name.value,
                                        "steps": spec.steps}}, sort_keys=True) + "\n")
        for doc in apply_all(corpus, spec):
            fh.write(json.dumps(doc.to_json(), ensure_ascii=False, sort_keys=True) + "\n")


def cmd_vectorize(run: Run) -> None:
    corpus = run.corpus()
    pipeline = run.cfg.pipeline
    docs = _docs(run, corpus, pipeline)
    vocab, raw = build_matrix(docs, Scheme.RAW, min_df=run.cfg.min_df)
    tag = f"{run.key}-{pipeline}"
    vpath = run.produced(run.work_path(f"vocab-{tag}.json"))
    vpath.write_text(json.dumps(dict(vocab.to_json(), config_hash=run.hash, digest=vocab.digest()),
                                ensure_ascii=False, sort_keys=True) + "\n", encoding="utf-8")
    meta = {"config_hash": run.hash, "vocab_hash": vocab.digest(), "ids": corpus.ids}
    raw.save(run.produced(run.work_path(f"matrix-{tag}-raw.npz")), meta)
    transform(docs, vocab, Scheme.TFIDF).save(run.produced(run.work_path(f"matrix-{tag}-tfidf.npz")), meta)


def cmd_detect_events(run: Run) -> None:
    cfg = run.cfg
    method = Method(cfg.method)
    corpus = run.corpus()
    events = detect_events(corpus, method, cfg.num_slices, cfg.top, derive_seed(cfg.seed, f"events/{method.value}"),
                           **_event_params(cfg, method))
    tag = f"{run.key}-{method.value}"
    jpath = run.produced(run.report_path(f"events-{tag}.json"))
    jpath.write_text(events_to_json(events, config_hash=run.hash, method=method.value, dataset=cfg.dataset) + "\n",
                     encoding="utf-8")
    tpath = run.produced(run.report_path(f"events-{tag}.txt"))
    tpath.write_text(f"# {method.title} on {cfg.dataset} (config {run.hash})\n" + format_table(events),
                     encoding="utf-8")


def cmd_train(run: Run) -> None:
    cfg = run.cfg
    model = ModelName(cfg.model)
    corpus = run.corpus().binary()
    seed = derive_seed(cfg.seed, f"model/{model.value}")
    pipe = train_pipeline(model, list(corpus), pipeline=cfg.pipeline, hyperparams=_hyperparams(cfg, model),
                          seed=seed, **_train_kwargs(cfg, model))
    run.models.mkdir(parents=True, exist_ok=True)
    path = run.produced(run.model_path(model.value, cfg.pipeline))
    pipe.save(path, seed=seed, meta={"config_hash": run.hash, "dataset": cfg.dataset})


def cmd_evaluate(run: Run) -> None:
    cfg = run.cfg
    corpus = run.corpus().binary()
    if cfg.model == "edsa":
        names = [ModelName(m) for m in _split(cfg.models)]
        trainer = ensemble_trainer(
            [m.value for m in names], cfg.pipeline,
            hyperparams={m.value: _hyperparams(cfg, m) for m in names},
            seed={m.value: derive_seed(cfg.seed, f"model/{m.value}") for m in names},
            threads=1, cbow_params=_cbow_params(cfg),
        )
    else:
        model = ModelName(cfg.model)
        trainer = model_trainer(model.value, cfg.pipeline, _hyperparams(cfg, model),
                                derive_seed(cfg.seed, f"model/{model.value}"), **_train_kwargs(cfg, model))
    result = kfold(list(corpus), trainer, k=cfg.k, seed=derive_seed(cfg.seed, "kfold"), threads=cfg.threads)
    row = {"dataset": cfg.dataset, "algorithm": cfg.model, "term_weight": _term_weight(cfg.model, cfg),
           "pipeline": cfg.pipeline, "accuracy": result.accuracy, "precision": result.precision,
           "recall": result.recall}
    tag = f"{run.key}-{cfg.model}-{cfg.pipeline}"
    lines = metrics_csv([row]).splitlines()
    csv_text = f"{lines[0]},config_hash\n" + "".join(f"{ln},{run.hash}\n" for ln in lines[1:])
    run.produced(run.report_path(f"metrics-{tag}.csv")).write_text(csv_text, encoding="utf-8")
    payload = dict(row, k=cfg.k, config_hash=run.hash, **{"kfold": result.to_dict()})
    run.produced(run.report_path(f"metrics-{tag}.json")).write_text(
        json.dumps(payload, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def cmd_ensemble(run: Run) -> None:
    cfg = run.cfg
    corpus = run.corpus()
    methods = [Method(m) for m in _split(cfg.methods)]
    names = _split(cfg.models)
    if not names:
        raise ConfigError("models is empty; enable at least one model")
    models = {m: _load_model(run, ModelName(m).value, cfg.pipeline) for m in names}
    given = {}
    for m in methods:
        path = run.reports / f"events-{run.key}-{m.value}.json"
        if path.exists():
            given[m] = _load_events(path)
    report = run_edsa(corpus, {m: _event_params(cfg, m) for m in methods}, models, events=given,
                      threads=cfg.threads, num_slices=cfg.num_slices, top_k=cfg.top, seed=cfg.seed)
    report.meta = {"config_hash": run.hash, "dataset": cfg.dataset, "pipeline": cfg.pipeline, "seed": cfg.seed}
    run.produced(run.report_path(f"ensemble-{run.key}.json")).write_text(report.dumps(), encoding="utf-8")
    csv_text = report.to_csv()
    head, *rows = csv_text.splitlines()
    csv_text = f"{head},config_hash\n" + "".join(f"{r},{run.hash}\n" for r in rows)
    run.produced(run.report_path(f"ensemble-{run.key}.csv")).write_text(csv_text, encoding="utf-8")


def cmd_report(run: Run) -> None:
    cfg = run.cfg
    reports = Path(cfg.report_dir)
    epath = run.require(reports / f"ensemble-{run.key}.json", "run `edsa ensemble` first")
    ens = json.loads(epath.read_text(encoding="utf-8"))
    out = [f"# Event sentiment report: {cfg.dataset}", "",
           f"config `{run.hash}`, ensemble config `{ens.get('config_hash', '')}`, models: {', '.join(ens['models'])}", ""]
    for m in ens["methods"]:
        out += [f"## {Method(m['name']).title}", "", "| # | Magnitude | Interval (UTC) | Keywords | Vote | Tweets |",
                "|---|---|---|---|---|---|"]
        for i, ev in enumerate(m["events"]):
            a, b = (time.strftime("%Y-%m-%d %H:%M", time.gmtime(t)) for t in ev["interval"])
            mag = ev["magnitude"]
            mag = f"{mag:.0f}" if float(mag).is_integer() else f"{mag:.2f}"
            out.append(f"| {i} | {mag} | {a} to {b} | {' '.join(ev['keywords'])} | {ev['vote']} | {len(ev['tweets'])} |")
        out.append("")
    metric_files = sorted(reports.glob(f"metrics-{run.key}-*.csv"))
    if metric_files:
        out += ["## Sentiment models", "", "| " + " | ".join(CSV_COLUMNS) + " |", "|" + "---|" * len(CSV_COLUMNS)]
        for f in metric_files:
            for line in f.read_text(encoding="utf-8").splitlines()[1:]:
                out.append("| " + " | ".join(line.split(",")[: len(CSV_COLUMNS)]) + " |")
        out.append("")
    run.produced(run.report_path(f"report-{run.key}.md")).write_text("\n".join(out), encoding="utf-8")


HANDLERS = {
    "ingest": cmd_ingest,
    "preprocess": cmd_preprocess,
    "vectorize": cmd_vectorize,
    "detect-events": cmd_detect_events,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "ensemble": cmd_ensemble,
    "report": cmd_report,
}


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int)
    common.add_argument("--dataset", help="c1, c2, c3 or a CSV path")
    common.add_argument("--pipeline", choices=[p.value for p in Pipeline])
    common.add_argument("--method", choices=[m.value for m in Method])
    common.add_argument("--model", choices=[m.value for m in ModelName] + ["edsa"])
    common.add_argument("--top", type=int)
    common.add_argument("--out", help="directory for this command's artifacts")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="edsa", description="Event detection and ensemble sentiment over tweet corpora.")
    parser.add_argument("--version", action="version", version=f"edsa {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    sub.add_parser("config", help="print the documented key list")
    return parser


def _validate(cfg: Config) -> None:
    """Choice-valued keys, checked up front so a typo fails as a config error."""
    choices = {
        "pipeline": [p.value for p in Pipeline],
        "method": [m.value for m in Method],
        "model": [m.value for m in ModelName] + ["edsa"],
    }
    for key, allowed in choices.items():
        if cfg[key] not in allowed:
            raise ConfigError(f"{key} = {cfg[key]!r}; expected one of {allowed}")
    for key, allowed in (("methods", choices["method"]), ("models", choices["model"][:-1])):
        bad = [v for v in _split(cfg[key]) if v not in allowed]
        if bad:
            raise ConfigError(f"{key}: unknown entry {bad[0]!r}; expected items of {allowed}")
    for key in ("threads", "top", "num_slices", "k"):
        if cfg[key] < 1:
            raise ConfigError(f"{key} must be at least 1")
    for key in ("lr_lr", "rc_lr"):
        if isinstance(cfg[key], str) and cfg[key] != "auto":
            raise ConfigError(f"{key} must be a number or \"auto\"")


def _fail(code: int, kind: str, message: str, command: str | None) -> int:
    line = {"error": kind, "message": " ".join(str(message).split()), "exit": code}
    if command:
        line["command"] = command
    print(json.dumps(line, sort_keys=True), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    command = None
    try:
        args = build_parser().parse_args(argv)
        command = args.command
        if command == "config":
            sys.stdout.write(describe())
            return 0
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        overrides = {k: getattr(args, k) for k in ("seed", "threads", "dataset", "pipeline", "method", "model", "top")}
        cfg = Config.load(args.config, overrides)
        _validate(cfg)
        if cfg.model == "edsa" and command != "evaluate":
            raise UsageError("--model edsa is only valid for evaluate")
        run = Run(command, cfg, argv, args.out)
        HANDLERS[command](run)
        manifest = run.write_manifest()
        for p in run.artifacts:
            print(p)
        log.info("manifest %s", manifest)
        return 0
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (ConfigError, UsageError) as exc:
        return _fail(EXIT_USAGE, "config" if isinstance(exc, ConfigError) else "usage", str(exc), command)
    except (MissingInput, FileNotFoundError) as exc:
        return _fail(EXIT_MISSING, "missing-input", str(exc), command)
    except HashMismatch as exc:
        return _fail(EXIT_HASH, "hash-mismatch", str(exc), command)
    except Exception as exc:  # noqa: BLE001 - reported as one machine-readable line
        return _fail(EXIT_FAIL, type(exc).__name__, str(exc), command)


if __name__ == "__main__":
    sys.exit(main())
