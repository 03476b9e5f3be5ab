"""Command-line front end.

Usage: ``cachenet <experiment> [--config FILE] [--out DIR] [--seed N]
[--trials N] [--budget LIST]``. Flags override configuration keys; see
``cachenet --help`` for the full key table with units and defaults.

Exit codes: 0 success, 2 configuration error, 3 infeasible budget,
4 numeric failure, 5 validation failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import Experiment, apply_entries, default_config, describe_keys, parse_config
from .errors import ConfigError, InfeasibleBudgetError, QuadratureConvergenceError
from .experiments import run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERIC = 4
EXIT_VALIDATION = 5


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cachenet",
        description=(
            "Evaluate, simulate, and optimize cache-aided two-tier cellular "
            "networks: closed-form success probability / ASE / EE sweeps, a "
            "Monte Carlo validation campaign, and budget-constrained "
            "deployment optimizers."
        ),
        epilog=describe_keys(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "experiment",
        choices=[e.value for e in Experiment],
        help="experiment to run",
    )
    parser.add_argument("--config", type=Path, help="configuration file (key = value lines)")
    parser.add_argument("--out", help="output directory (overrides out_dir)")
    parser.add_argument("--seed", type=int, help="base RNG seed (overrides seed)")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials per cell (overrides trials)")
    parser.add_argument(
        "--budget",
        help="budget in $/m^2, or a comma-separated list (overrides budget)",
    )
    return parser


def _load_config(args: argparse.Namespace):
    config = default_config()
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}") from None
        config = parse_config(text, base=config)

    overrides: dict[str, str] = {"experiment": args.experiment}
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if args.trials is not None:
        overrides["trials"] = str(args.trials)
    if args.budget is not None:
        overrides["budget"] = args.budget
    return apply_entries(config, overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load_config(args)
        result = run(config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleBudgetError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (QuadratureConvergenceError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for path in result.files:
        print(path)
    return result.status


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
