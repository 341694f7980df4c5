# src/cli.py
"""
Command-line front end.

    python main.py <subcommand> [--config run.json] [--out DIR] [--seed N] [--threads N]

Exit codes: 0 success, 1 unexpected error, 2 configuration error, 3 numeric failure,
4 validation failure.
"""
import argparse
import json
from pathlib import Path
from typing import Any, Dict, List, Optional

import structlog
from pydantic import ValidationError

from src.agent_library.errors import ConfigError, InvalidArgsError, NumericFailure, ValidationFailure
from src.config import configure_logging, get_settings
from src.models import RunConfig, Subcommand
from src.orchestrators.experiment_runner import ExperimentRunner

logger = structlog.get_logger()

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VALIDATION = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dlnbayes",
        description="Exact and asymptotic Bayesian interpolation with deep linear networks.",
    )
    parser.add_argument("subcommand", choices=[s.value for s in Subcommand])
    parser.add_argument("--config", type=Path, help="JSON file with RunConfig fields")
    parser.add_argument("--out", help="Output directory (default: out)")
    parser.add_argument("--seed", type=int, help="Unsigned 64-bit seed")
    parser.add_argument("--threads", type=int, help="Worker processes")
    parser.add_argument("--log-level", help="Overrides DLN_LOG_LEVEL")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    """
    Merge the JSON config file with command-line flags; flags win.

    Raises:
        ConfigError: If the file is unreadable or the merged values are invalid
    """
    values: Dict[str, Any] = {}
    if args.config is not None:
        try:
            values = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Cannot read config {args.config}: {e}") from e
        if not isinstance(values, dict):
            raise ConfigError(f"Config {args.config} must hold a JSON object")

    values["subcommand"] = args.subcommand
    for flag in ("out", "seed", "threads"):
        if getattr(args, flag) is not None:
            values[flag] = getattr(args, flag)
    values.setdefault("threads", get_settings().threads)

    try:
        return RunConfig.model_validate(values)
    except ValidationError as e:
        raise ConfigError(f"Invalid run configuration: {e}") from e


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        configure_logging(args.log_level or get_settings().log_level)
        config = load_config(args)
        manifest = ExperimentRunner(config).run()
    except (ConfigError, InvalidArgsError) as e:
        logger.error("Configuration error", error=str(e))
        return EXIT_CONFIG
    except ValidationFailure as e:
        logger.error("Validation failed", failed_checks=e.failed_checks)
        return EXIT_VALIDATION
    except NumericFailure as e:
        logger.error("Numeric failure", error=str(e))
        return EXIT_NUMERIC
    except Exception as e:
        logger.exception("Unexpected error", error_type=type(e).__name__, error=str(e))
        return EXIT_INTERNAL

    logger.info("Run complete", csv=manifest.csv_path, rows=manifest.rows)
    return EXIT_OK
