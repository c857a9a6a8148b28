"""Operator command line: serve, one-shot ask, ingest, eval.

Exit codes: 0 success, 1 pipeline/API error, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import ServiceConfig, load_config
from .engine import Engine
from .errors import ConfigError, KbqaError
from .evalharness import (
    GRID_SETTINGS,
    ablation_grid,
    grid_to_json,
    load_dataset,
    render_grid_table,
    run_eval,
)
from .service import create_app, payload_view

ABLATION_CHOICES = ("grid", "all", "no_rule", "no_embedding", "no_llm", "no_adapt")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kbqa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--config", default=None, help="path to a JSON config file")

    ask = sub.add_parser("ask", help="answer one question and exit")
    ask.add_argument("--question", required=True)
    ask.add_argument("--lang", default=None)
    ask.add_argument("--config", default=None)

    ingest = sub.add_parser("ingest", help="load a data file and print the report")
    ingest.add_argument("kind", choices=("triples", "seeds", "templates", "rules"))
    ingest.add_argument("file")
    ingest.add_argument("--config", default=None)

    eval_cmd = sub.add_parser("eval", help="run the accuracy evaluation")
    eval_cmd.add_argument("--dataset", default=None, help="JSONL case file")
    eval_cmd.add_argument(
        "--ablation",
        default="grid",
        choices=ABLATION_CHOICES,
        help="one setting, or 'grid' for the full table",
    )
    eval_cmd.add_argument("--json-out", default=None, help="write the JSON report here")
    eval_cmd.add_argument("--config", default=None)

    return parser


def _engine(config_path: str | None) -> Engine:
    return Engine(load_config(config_path))


def _cmd_serve(args) -> int:
    import uvicorn

    config = load_config(args.config)
    engine = Engine(config)
    uvicorn.run(create_app(engine), host=config.host, port=config.port, log_level="warning")
    return 0


def _cmd_ask(args) -> int:
    engine = _engine(args.config)
    result = engine.ask(args.question, lang=args.lang)
    view = {
        "answer": payload_view(result.payload),
        "session_id": result.session.id,
    }
    print(json.dumps(view, indent=2, ensure_ascii=False))
    return 0


def _cmd_ingest(args) -> int:
    engine = _engine(args.config)
    report = engine.ingest_file(args.kind, args.file)
    print(json.dumps(report.as_dict(), indent=2, ensure_ascii=False))
    return 0


def _ablation_config(config: ServiceConfig, name: str) -> ServiceConfig:
    switches = {
        "all": {},
        "no_rule": {"disable_rule": True},
        "no_embedding": {"disable_embedding": True},
        "no_llm": {"disable_llm": True},
        "no_adapt": {"disable_adapt": True},
    }[name]
    return config.with_ablation(**switches)


def _cmd_eval(args) -> int:
    config = load_config(args.config)
    dataset_path = args.dataset or config.eval_dataset
    cases = load_dataset(dataset_path)
    if args.ablation == "grid":
        grid = ablation_grid(cases, config)
    else:
        label = dict(
            zip(("all", "no_rule", "no_embedding", "no_llm", "no_adapt"),
                (name for name, _ in GRID_SETTINGS))
        )[args.ablation]
        grid = {label: run_eval(cases, _ablation_config(config, args.ablation))}
    print(render_grid_table(grid))
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            fh.write(grid_to_json(grid))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "serve": _cmd_serve,
        "ask": _cmd_ask,
        "ingest": _cmd_ingest,
        "eval": _cmd_eval,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except KbqaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
