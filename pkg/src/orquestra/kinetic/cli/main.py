################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
"""Command line entry point: one subcommand per experiment plus validate and report.

Exit codes: 0 when every acceptance check passes, 1 for an invalid configuration,
2 for a failure during the run and 3 when an acceptance check fails.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import rapidjson as json

from ._config import EXPERIMENTS, ConfigError, ExperimentConfig, load_experiment_config
from ._experiments import ExperimentError, refit_outputs, run_experiment

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2
EXIT_CHECK_FAILED = 3

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

logger = logging.getLogger(__name__)


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits: {text}")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orquestra-kinetic",
        description="Spectral experiments for coupled kinetic-fluid perturbations.",
    )
    parser.add_argument(
        "--log-level",
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging threshold (default: INFO).",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    for experiment in EXPERIMENTS:
        command = commands.add_parser(experiment, help=f"Run the {experiment} suite.")
        command.add_argument(
            "--config", type=Path, help="JSON configuration (default: built-in)."
        )
        command.add_argument("--out", type=Path, help="Output directory override.")
        command.add_argument("--seed", type=_seed, help="Seed override.")
        command.add_argument(
            "--threads",
            type=_positive,
            default=1,
            help="Worker processes (default: 1).",
        )
    validate = commands.add_parser("validate", help="Parse and validate a config.")
    validate.add_argument("--config", type=Path, required=True)
    report = commands.add_parser("report", help="Re-fit the tables of a finished run.")
    report.add_argument("--out", type=Path, required=True, help="Run directory.")
    return parser


def _load(path: Optional[Path], experiment: str) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig.default(experiment)
    config = load_experiment_config(path)
    if config.experiment != experiment:
        raise ConfigError(
            f"{path} configures {config.experiment!r}, not {experiment!r}."
        )
    return config


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT)

    if args.command == "validate":
        try:
            config = load_experiment_config(args.config)
        except (ConfigError, OSError) as error:
            logger.error("Invalid configuration: %s", error)
            return EXIT_INVALID
        logger.info("%s is a valid %s configuration", args.config, config.experiment)
        return EXIT_OK

    if args.command == "report":
        try:
            fits = refit_outputs(args.out)
        except (ValueError, OSError, KeyError) as error:
            logger.error("Cannot re-fit %s: %s", args.out, error)
            return EXIT_RUNTIME
        print(json.dumps(fits, indent=2, sort_keys=True))
        return EXIT_OK

    try:
        config = _load(args.config, args.command).with_overrides(
            seed=args.seed, output_dir=None if args.out is None else str(args.out)
        )
    except (ConfigError, OSError) as error:
        logger.error("Invalid configuration: %s", error)
        return EXIT_INVALID
    try:
        manifest = run_experiment(config, threads=args.threads)
    except (ExperimentError, OSError) as error:
        logger.error("Run failed: %s", error)
        return EXIT_RUNTIME
    failed = [name for name, passed in manifest.checks.items() if not passed]
    if failed:
        logger.warning("Acceptance checks failed: %s", ", ".join(failed))
        return EXIT_CHECK_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
