"""Command-line entry point: ``skpsi <experiment> [options]``."""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from skpsi.exceptions import CalculusError
from skpsi.harness.config import EXPERIMENTS, load_config
from skpsi.harness.experiments import run

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_ERROR = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skpsi",
        description="Numerical experiments for parameter-dependent "
        "pseudodifferential operators on the circle.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config", type=Path, default=None, help="TOML experiment file."
    )
    common.add_argument(
        "--out",
        type=Path,
        default=None,
        help="Output directory (default: output.dir of the configuration).",
    )
    common.add_argument("--seed", type=int, default=None, help="Random seed.")
    common.add_argument(
        "--grid-K", type=int, default=None, help="Truncation cutoff K."
    )
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="More logging."
    )
    subparsers = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        subparsers.add_parser(name, parents=[common], help=f"Run {name}.")
    return parser


def _configure_logging(verbosity: int):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(
        level=level, format="%(asctime)s %(name)s %(levelname)s %(message)s"
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one experiment and write its report.

    Returns 0 when every check passes, 1 when a check fails and 2 when the
    configuration or a computation raises.
    """
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        config = load_config(
            args.config,
            experiment=args.experiment,
            seed=args.seed,
            grid_K=args.grid_K,
            out=args.out,
        )
        envelope = run(config)
    except CalculusError as err:
        notes = "; ".join(getattr(err, "__notes__", []))
        print(f"[skpsi] ERROR {type(err).__name__}: {err} {notes}".rstrip())
        return EXIT_ERROR
    path = envelope.write(config.output["dir"])
    status = "OK" if envelope.passed else "FAIL"
    print(
        f"[skpsi] {config.experiment} {status} "
        f"(checks={len(envelope.checks)}, failed={envelope.failed_checks}, "
        f"report={path})"
    )
    return EXIT_OK if envelope.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
