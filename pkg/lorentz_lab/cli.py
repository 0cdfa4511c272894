"""
Command-line entry point: lorentz-lab <experiment> --config <path> [--csv <path>]
"""

import argparse
import asyncio
import csv
import json
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import ValidationError

from lorentz_lab import __version__
from lorentz_lab.core.errors import ExperimentConfigError, LorentzLabError
from lorentz_lab.core.logging import get_logger, setup_logging
from lorentz_lab.models.experiment import ExperimentConfig, ExperimentName, ExperimentReport
from lorentz_lab.services.experiment_service import build_experiment_service

logger = get_logger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


def load_config(path: Optional[Path]) -> ExperimentConfig:
    """Read a JSON experiment config; defaults apply when no path is given"""
    if path is None:
        return ExperimentConfig()
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ExperimentConfigError(f"cannot read config {path}: {e}")
    except json.JSONDecodeError as e:
        raise ExperimentConfigError(f"config {path} is not valid JSON: {e}")
    if not isinstance(payload, dict):
        raise ExperimentConfigError("config must be a JSON object")
    try:
        return ExperimentConfig.model_validate(payload)
    except ValidationError as e:
        raise ExperimentConfigError(str(e))


def write_csv(report: ExperimentReport, path: Path):
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["trial", "defect", "bound", "pass"])
        for record in report.trials:
            defect = "" if record.defect is None else repr(record.defect)
            writer.writerow([record.trial, defect, repr(record.bound), str(record.passed).lower()])


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="lorentz-lab",
        description="Run seeded experiments on the infinite-dimensional hyperbolic and Hilbert spaces.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subcommands = parser.add_subparsers(dest="experiment", required=True, metavar="experiment")
    for name in ExperimentName:
        sub = subcommands.add_parser(name.value, help=f"run the {name.value} experiment")
        sub.add_argument("--config", type=Path, default=None, help="Path to a JSON experiment config")
        sub.add_argument("--csv", type=Path, default=None, help="Write one row per trial to this path")
    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    setup_logging()

    try:
        config = load_config(args.config)
        service = build_experiment_service()
        report = asyncio.run(service.run(args.experiment, config))
    except LorentzLabError as e:
        logger.error(f"Experiment not run: {str(e)}", error=type(e).__name__)
        print(f"[error] {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_CONFIG

    print(json.dumps(report.model_dump(mode="json", by_alias=True), indent=2, sort_keys=True))
    if args.csv is not None:
        write_csv(report, args.csv)
    return EXIT_PASS if report.aggregate.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
