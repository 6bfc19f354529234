"""Command-line entry point: train, evaluate, serve, ingest, query.

Configuration comes from an optional JSON config file plus flags; flags
win. Exit codes: 0 success, 2 input error, 3 environment error, 64 usage
error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from datetime import date

from . import evaluation, pipeline, schema, svm
from .api import create_app, available_languages
from .errors import InfodemicError
from .langid import SUPPORTED_LANGUAGES
from .store import RecordStore

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ENV = 3
EXIT_USAGE = 64

logger = logging.getLogger(__name__)

CONFIG_DEFAULTS = {
    "model_dir": "models",
    "store_dir": "store",
    "languages": list(SUPPORTED_LANGUAGES),
    "c_grid": list(svm.DEFAULT_C_GRID),
    "min_df": 2,
    "split_seed": evaluation.DEFAULT_SPLIT_SEED,
    "host": "127.0.0.1",
    "port": 8080,
    "workers": 2,
    "ttl_seconds": 24 * 3600,
    "ui_dir": None,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; we reserve that
        raise UsageError(message)


def load_config(path: str | None) -> dict:
    """Defaults, overlaid by the config file, then INFODEMIC_* environment
    variables; command-line flags override all of these."""
    config = dict(CONFIG_DEFAULTS)
    if path:
        with open(path, encoding="utf-8") as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(CONFIG_DEFAULTS)
        if unknown:
            raise InfodemicError(f"unknown config keys: {sorted(unknown)}")
        config.update(loaded)
    for key, default in CONFIG_DEFAULTS.items():
        raw = os.environ.get(f"INFODEMIC_{key.upper()}")
        if raw is None:
            continue
        if isinstance(default, int) and not isinstance(default, bool):
            config[key] = int(raw)
        elif isinstance(default, float):
            config[key] = float(raw)
        elif isinstance(default, list):
            config[key] = raw.split(",")
        else:
            config[key] = raw
    return config


def _setting(args, config: dict, key: str):
    value = getattr(args, key, None)
    return value if value is not None else config[key]


def _parse_date(value: str | None, flag: str) -> date | None:
    if value is None:
        return None
    try:
        return date.fromisoformat(value)
    except ValueError:
        raise UsageError(f"{flag} expects an ISO date (YYYY-MM-DD), got {value!r}")


def _language_models(all_models, language):
    return {
        (q, t): m for (lang, q, t), m in all_models.items() if lang == language
    }


def cmd_train(args, config) -> int:
    seed = int(_setting(args, config, "split_seed"))
    c_grid = tuple(float(c) for c in _setting(args, config, "c_grid"))
    min_df = int(_setting(args, config, "min_df"))
    dataset = evaluation.load_dataset(args.dataset, args.language)
    assignment = evaluation.stratified_split(dataset, seed=seed)

    out_dir = args.out_dir
    os.makedirs(out_dir, exist_ok=True)
    manifest_path = os.path.join(out_dir, f"split_manifest_{args.language}.tsv")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        fh.write(f"# seed={seed}\n")
        for i in sorted(assignment.splits):
            fh.write(f"{i}\t{assignment.splits[i]}\n")

    dev_metrics = {}
    for question in schema.QUESTION_IDS:
        pools = evaluation.question_pools(dataset, assignment, question)
        for task in schema.TASKS:
            model = svm.train_question(
                pools["train"], pools["dev"], question, task,
                c_grid=c_grid, min_df=min_df, language=args.language,
            )
            bundle = os.path.join(
                out_dir, args.language, svm.bundle_name(question, task)
            )
            svm.save_bundle(model, bundle)
            dev_metrics[f"{question}_{task}"] = model.metrics
            print(f"trained {args.language}/{question}/{task}: "
                  f"C={model.C} dev_weighted_f1={model.metrics['dev_weighted_f1']:.4f}")
    with open(os.path.join(out_dir, f"dev_metrics_{args.language}.json"),
              "w", encoding="utf-8") as fh:
        json.dump(dev_metrics, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK


def cmd_evaluate(args, config) -> int:
    seed = int(_setting(args, config, "split_seed"))
    dataset = evaluation.load_dataset(args.dataset, args.language)
    assignment = evaluation.stratified_split(dataset, seed=seed)
    models = _language_models(svm.load_model_set(args.model_dir), args.language)
    rep = evaluation.report(models, dataset, assignment)
    print(evaluation.render_report(rep), end="")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rep, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def cmd_serve(args, config) -> int:
    import uvicorn

    model_dir = _setting(args, config, "model_dir")
    models = svm.load_model_set(model_dir)
    if not available_languages(models):
        print(f"error: no complete model set found under {model_dir}", file=sys.stderr)
        return EXIT_ENV
    store_dir = _setting(args, config, "store_dir")
    record_store = RecordStore(store_dir) if store_dir else None
    app = create_app(
        models,
        record_store=record_store,
        workers=int(_setting(args, config, "workers")),
        ttl_seconds=float(_setting(args, config, "ttl_seconds")),
    )
    ui_dir = _setting(args, config, "ui_dir")
    if ui_dir and os.path.isdir(ui_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")
    host = _setting(args, config, "host")
    port = int(_setting(args, config, "port"))
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except (OSError, SystemExit) as exc:
        print(f"error: cannot serve on {host}:{port}: {exc}", file=sys.stderr)
        return EXIT_ENV
    finally:
        if record_store is not None:
            record_store.close()
    return EXIT_OK


def cmd_ingest(args, config) -> int:
    model_dir = _setting(args, config, "model_dir")
    models = _language_models(svm.load_model_set(model_dir), args.language)
    store_dir = _setting(args, config, "store_dir")
    with RecordStore(store_dir) as record_store:
        summary = pipeline.ingest(
            pipeline.read_source(args.source),
            target_language=args.language,
            models=models,
            store=record_store,
        )
    for key, value in summary.as_dict().items():
        print(f"{key}={value}")
    return EXIT_OK


def cmd_query(args, config) -> int:
    store_dir = _setting(args, config, "store_dir")
    date_from = _parse_date(args.date_from, "--from")
    date_to = _parse_date(args.date_to, "--to")
    with RecordStore(store_dir) as record_store:
        matches = record_store.query(
            keyword=args.keyword, date_from=date_from, date_to=date_to,
            language=args.language,
        )
        print(f"matches={len(matches)}")
        buckets = record_store.aggregate(
            question=args.question, task=args.task, keyword=args.keyword,
            date_from=date_from, date_to=date_to, language=args.language,
        )
        for bucket in buckets:
            counts = " ".join(f"{lab}={c}" for lab, c in sorted(bucket.counts.items()))
            print(f"{bucket.date.isoformat()} {bucket.question}/{bucket.task} {counts}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="infodemic", description=__doc__)
    parser.add_argument("--config", help="path to a JSON config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train 7x2 model bundles from a labeled dataset")
    p.add_argument("dataset", help="tab-separated labeled dataset")
    p.add_argument("language", choices=SUPPORTED_LANGUAGES)
    p.add_argument("out_dir", help="model output directory")
    p.add_argument("--split-seed", dest="split_seed", type=int)
    p.add_argument("--min-df", dest="min_df", type=int)
    p.add_argument("--c-grid", dest="c_grid", type=float, nargs="+")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="report majority vs SVM weighted-F1 per question")
    p.add_argument("dataset")
    p.add_argument("language", choices=SUPPORTED_LANGUAGES)
    p.add_argument("model_dir")
    p.add_argument("--split-seed", dest="split_seed", type=int,
                   help="must match the seed used at training time to "
                        "reproduce the same test split")
    p.add_argument("--json", help="also write the report as JSON to this path")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("serve", help="run the classification API service")
    p.add_argument("--model-dir", dest="model_dir")
    p.add_argument("--store-dir", dest="store_dir")
    p.add_argument("--host", dest="host")
    p.add_argument("--port", dest="port", type=int)
    p.add_argument("--workers", dest="workers", type=int)
    p.add_argument("--ttl-seconds", dest="ttl_seconds", type=float)
    p.add_argument("--ui-dir", dest="ui_dir")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("ingest", help="classify and store a file of raw records")
    p.add_argument("source", help="line-delimited JSON records")
    p.add_argument("language", choices=SUPPORTED_LANGUAGES)
    p.add_argument("--model-dir", dest="model_dir")
    p.add_argument("--store-dir", dest="store_dir")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("query", help="search the store and print day aggregates")
    p.add_argument("--store-dir", dest="store_dir")
    p.add_argument("--keyword")
    p.add_argument("--from", dest="date_from")
    p.add_argument("--to", dest="date_to")
    p.add_argument("--language", choices=SUPPORTED_LANGUAGES)
    p.add_argument("--question", default="Q1", choices=schema.QUESTION_IDS)
    p.add_argument("--task", default="binary", choices=schema.TASKS)
    p.set_defaults(func=cmd_query)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = load_config(args.config)
        return args.func(args, config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfodemicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
