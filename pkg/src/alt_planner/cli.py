"""Command line entry points.

    alt-planner study --config cfg.json --out results/ [--threads N] [--seed S]
    alt-planner validate-config cfg.json
    alt-planner serve --data-dir ./data --port 8000
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import ConfigError
from .harness import StudyConfig, run_study, write_csvs


def _load_config(path: str) -> StudyConfig:
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    if not isinstance(doc, dict):
        raise ConfigError({"<root>": "config file must hold a JSON object"})
    return StudyConfig.from_dict(doc)


def _cmd_study(args: argparse.Namespace) -> int:
    try:
        config = _load_config(args.config)
    except ConfigError as exc:
        _print_config_errors(exc)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config unreadable: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        config.seed = args.seed
        config.validate()
    result = run_study(config, threads=args.threads)
    out_dir = Path(args.out)
    write_csvs(result, out_dir)
    print(f"wrote {out_dir / 'pcs.csv'}, {out_dir / 'traces.csv'}, {out_dir / 'meta.csv'}")
    print(f"overall censoring rate: {result.censor_rate:.4f}")
    for (kind, track), curve in result.pcs.items():
        print(f"  {kind.value}/{track.value}: final PCS {curve[-1]:.3f}")
    return 0


def _print_config_errors(exc: ConfigError) -> None:
    print("config invalid:", file=sys.stderr)
    for field, msg in sorted(exc.messages.items()):
        print(f"  {field}: {msg}", file=sys.stderr)


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        config = _load_config(args.config)
    except ConfigError as exc:
        _print_config_errors(exc)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config unreadable: {exc}", file=sys.stderr)
        return 2
    print(f"config OK: {len(config.methods)} methods, "
          f"{config.replications} replications, {config.n_steps} steps")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import DATA_DIR_ENV, create_app

    data_dir = args.data_dir or os.environ.get(DATA_DIR_ENV) or "./alt-planner-data"
    app = create_app(data_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alt-planner")
    sub = parser.add_subparsers(dest="command", required=True)

    study = sub.add_parser("study", help="run a batch simulation study")
    study.add_argument("--config", required=True, help="JSON study configuration")
    study.add_argument("--out", required=True, help="output directory for CSVs")
    study.add_argument("--threads", type=int, default=1)
    study.add_argument("--seed", type=int, default=None, help="override the config seed")
    study.set_defaults(fn=_cmd_study)

    validate = sub.add_parser("validate-config", help="check a study configuration")
    validate.add_argument("config", help="JSON study configuration")
    validate.set_defaults(fn=_cmd_validate)

    serve = sub.add_parser("serve", help="run the experiment advisor service")
    serve.add_argument("--data-dir", default=None,
                       help="session log directory (default: $ALT_PLANNER_DATA_DIR "
                            "or ./alt-planner-data)")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.set_defaults(fn=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
