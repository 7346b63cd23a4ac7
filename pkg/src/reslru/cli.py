"""Command-line front end: one subcommand per reproducible experiment."""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .config import load_config
from .errors import ConfigError, ResLRUError
from .experiments import COMMANDS

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _error_json(kind: str, exc: Exception) -> str:
    return json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reslru",
        description=(
            "Leakage-removal pulse simulation and optimization for a driven "
            "transmon-resonator pair, with a surface-code leakage Monte Carlo."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__.splitlines()[0] if fn.__doc__ else None)
        p.add_argument("--config", type=str, default=None, help="TOML config file")
        p.add_argument("--preset", type=str, default=None, help="named parameter preset")
        p.add_argument("--seed", type=int, default=None, help="override run.seed")
        p.add_argument("--threads", type=int, default=None, help="worker count")
        p.add_argument("--out", type=str, default=None, help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides: dict = {"run": {}}
    if args.seed is not None:
        overrides["run"]["seed"] = args.seed
    if args.out is not None:
        overrides["run"]["output_dir"] = args.out
    threads = args.threads
    if threads is None:
        env = os.environ.get("RESLRU_THREADS")
        if env is not None:
            try:
                threads = int(env)
            except ValueError:
                print(
                    _error_json("config", ValueError(f"RESLRU_THREADS={env!r}")),
                    file=sys.stderr,
                )
                return EXIT_CONFIG
    if threads is not None:
        overrides["run"]["threads"] = threads

    try:
        cfg = load_config(args.config, preset=args.preset, overrides=overrides)
    except (ConfigError, OSError) as exc:
        print(_error_json("config", exc), file=sys.stderr)
        return EXIT_CONFIG

    try:
        outputs = COMMANDS[args.command](cfg)
    except ResLRUError as exc:
        print(_error_json("numerical", exc), file=sys.stderr)
        return EXIT_NUMERICAL
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(_error_json("numerical", exc), file=sys.stderr)
        return EXIT_NUMERICAL
    for path in outputs:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
