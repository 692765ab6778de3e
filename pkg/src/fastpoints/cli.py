"""Command line entry point: ``fastpoints run|validate|dims``.

Exit codes: 0 success, 2 usage error, 3 resolution or configuration error,
4 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields

from . import experiments
from .errors import ConfigurationError, FitError, ResolutionError, UsageError

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _levels(text):
    lo, _, hi = text.partition(":")
    try:
        return int(lo), int(hi or lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN:MAX, got {text!r}") from None


def _float(text):
    from fractions import Fraction

    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat key = value file; flags given here override it")
    common.add_argument("--preset", choices=experiments.PRESETS)
    common.add_argument("--seed", type=int, help="master seed (default: $FASTPOINTS_SEED or 0)")
    common.add_argument("--paths", type=int, help="number of sample paths")
    common.add_argument("--levels", type=_levels, metavar="MIN:MAX")
    common.add_argument("--a", type=_float)
    common.add_argument("--epsilon", type=_float)
    common.add_argument("--drift", metavar="SPEC", help="e.g. zero, linear:c=0.5, cantor:gamma=1/9,depth=20")
    common.add_argument("--hurst", type=_float)
    common.add_argument("--out", metavar="PATH", help="CSV destination (default stdout)")
    common.add_argument("--workers", type=int)

    p = _Parser(prog="fastpoints", description="Fast-point experiments on sampled Brownian paths.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("run", parents=[common], help="run a preset and emit CSV")
    sub.add_parser("validate", parents=[common], help="check a configuration without running it")
    sub.add_parser("dims", parents=[common], help="closed-form dimension table")
    return p


def config_from_args(args) -> experiments.ExperimentConfig:
    values = experiments.load_config(args.config) if args.config else {}
    cli = {
        "preset": args.preset,
        "master_seed": args.seed,
        "n_paths": args.paths,
        "a": args.a,
        "epsilon": args.epsilon,
        "drift": args.drift,
        "hurst": args.hurst,
        "output_path": args.out,
        "workers": args.workers,
    }
    if args.levels:
        cli["level_min"], cli["level_max"] = args.levels
    values.update({k: v for k, v in cli.items() if v is not None})
    if args.command == "dims":
        values["preset"] = "dims"
    known = {f.name for f in fields(experiments.ExperimentConfig)}
    return experiments.ExperimentConfig(**{k: v for k, v in values.items() if k in known})


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        config = config_from_args(args)
    except UsageError as exc:
        print(f"fastpoints: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"fastpoints: cannot read config: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.command == "validate":
        report = experiments.validate(config)
        print("\n".join(report.lines()))
        return EXIT_OK if report.ok else EXIT_CONFIG

    try:
        rows = experiments.run(config)
    except (ConfigurationError, ResolutionError, UsageError) as exc:
        print(f"fastpoints: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FloatingPointError, FitError, ArithmeticError) as exc:
        print(f"fastpoints: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if not config.output_path:
        sys.stdout.write(experiments.rows_to_csv(rows))
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
