"""Command-line entry point for the tripdiff toolkit.

    python app.py simulate --design cross-stratum-staggered --out runs/sim
    python app.py estimate --input runs/sim/panel.csv --out runs/est --bootstrap pigeonhole
    python app.py estimate --input survey.csv --out runs/svy --cell-weights n-sr --bootstrap both
    python app.py decompose --input runs/sim/panel.csv --out runs/dec --term-dump
    python app.py event-study --input runs/sim/panel.csv --out runs/es --max-pre 3 --max-post 4
"""

import argparse
import logging
import sys
from typing import Optional

from pydantic import ValidationError

import config
from cli import COMMANDS, RunConfig, run_command


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _shared_arguments() -> argparse.ArgumentParser:
    """Flags every subcommand accepts."""
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--input", help="panel CSV with header s,r,t,y,d or s,r,t,y,g; a unit column marks individual rows")
    shared.add_argument("--out", default=".", help="output directory")
    shared.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    shared.add_argument("--bootstrap", choices=["none", "cluster", "pigeonhole", "both"], default="none",
                        help="both (estimate only) reports one-way and pigeonhole errors side by side")
    shared.add_argument("--draws", type=int, default=config.DEFAULT_DRAWS, help="bootstrap draws B")
    shared.add_argument("--cluster", dest="cluster_key", choices=["pair", "s", "r"], default="pair",
                        help="cluster definition for --bootstrap cluster")
    shared.add_argument("--threads", type=int, default=config.DEFAULT_THREADS)
    shared.add_argument("--adoption-plot", action="store_true", help="also write the adoption pattern as adoption.svg")
    shared.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    return shared


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tripdiff", description="Staggered triple-differences toolkit")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    shared = _shared_arguments()

    estimators = argparse.ArgumentParser(add_help=False)
    estimators.add_argument("--comparison", choices=["not-yet-treated", "never-treated"], default="not-yet-treated")
    estimators.add_argument("--t-star", choices=["last-pre", "full-window"], default="last-pre")
    estimators.add_argument("--weighting", choices=["uniform", "cohort-size"], default="uniform")

    estimate = subparsers.add_parser("estimate", parents=[shared, estimators],
                                     help="regression, imputation and triple-difference estimates")
    estimate.add_argument("--cell-weights", choices=["uniform", "n-sr"], default="uniform",
                          help="n-sr weights each cell by its number of units")

    decompose = subparsers.add_parser("decompose", parents=[shared], help="comparison decomposition")
    decompose.add_argument("--term-dump", action="store_true", help="also write every term to terms.csv")
    decompose.add_argument("--tuple-cap", type=int, default=config.TUPLE_CAP)

    event_study = subparsers.add_parser("event-study", parents=[shared], help="event study with placebo lags")
    event_study.add_argument("--max-pre", type=int, default=0)
    event_study.add_argument("--max-post", type=int, default=0)
    event_study.add_argument("--placebo-scope", choices=["window", "lag-period"], default="window")

    simulate = subparsers.add_parser("simulate", parents=[shared], help="simulated panel with truth table")
    simulate.add_argument("--design", choices=["pure-placebo-stratum", "cross-stratum-staggered",
                                               "within-stratum-staggered"])
    simulate.add_argument("--config", dest="dgp_config", help="DGP settings as JSON")
    return parser


# ---------------------------------------------------------------------------
# Main
# ---------------------------------------------------------------------------

def main(argv: Optional[list[str]] = None) -> int:
    args = vars(build_parser().parse_args(argv))
    verbose = args.pop("verbose")
    logging.basicConfig(
        level=logging.DEBUG if verbose else config.LOG_LEVEL,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        cfg = RunConfig(**args)
    except ValidationError as e:
        print(f"InvalidConfig: {e}", file=sys.stderr)
        return config.EXIT_INPUT
    return run_command(COMMANDS[cfg.subcommand.value], cfg)


if __name__ == "__main__":
    sys.exit(main())
