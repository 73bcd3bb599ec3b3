"""Command line entry point: ``raymimo {run,list,validate}``.

Exit codes: 0 success, 2 configuration error, 3 numerical-accuracy failure.
"""

import argparse
import sys

from ..errors import BesselOverflowError, ConfigurationError, QuadratureAccuracyError
from .config import load_config, resolve, validate_config
from .figures import REGISTRY
from .runner import run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _parser():
    parser = argparse.ArgumentParser(prog="raymimo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment from a YAML config")
    run.add_argument("--config", required=True)
    run.add_argument("--seed", type=int)
    run.add_argument("--out")
    sub.add_parser("list", help="list registered experiments")
    val = sub.add_parser("validate", help="check a config without running it")
    val.add_argument("--config", required=True)
    return parser


def main(argv=None):
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.command == "list":
        for name, exp in REGISTRY.items():
            print(f"{name:8s} {exp.description}")
        return EXIT_OK
    try:
        raw = load_config(args.config)
        if args.command == "validate":
            findings = validate_config(raw)
            for f in findings:
                print(f)
            if any(f.level == "error" for f in findings):
                return EXIT_CONFIG
            print("ok")
            return EXIT_OK
        for f in validate_config(raw):
            if f.level == "warning":
                print(f, file=sys.stderr)
        config = resolve(raw, seed=args.seed, out=args.out)
        result = run_experiment(config)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureAccuracyError, BesselOverflowError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for name in result.files:
        print(result.directory / name)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
