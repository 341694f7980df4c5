# src/orchestrators/experiment_runner.py
"""
Runs one experiment over its grid and writes the CSV and the JSON manifest.

Grid points go to a process pool when more than one worker is configured.
Rows are collected in grid order whatever the completion order, so a given
RunConfig always produces the same CSV bytes.
"""
import json
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from importlib.metadata import PackageNotFoundError, version
from itertools import repeat
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd
import structlog

# Import all experiments so the registry is populated
import src.experiments  # noqa: F401
from src.agent_library.decorators import ignored_fields
from src.agent_library.registry import create_experiment_from_registry
from src.config import apply_overrides, configure_logging, get_settings
from src.models import RunConfig, RunManifest

logger = structlog.get_logger()

FLOAT_FORMAT = "%.17g"


def code_version() -> str:
    try:
        return version("dlnbayes")
    except PackageNotFoundError:
        return "0.1.0+source"


def _init_worker(log_level: str, tolerances: Dict[str, float]) -> None:
    configure_logging(log_level)
    apply_overrides(tolerances)


def _run_point(config_json: str, params: Dict[str, Any]) -> Dict[str, Any]:
    config = RunConfig.model_validate_json(config_json)
    experiment = create_experiment_from_registry(config)
    return experiment.execute_with_validation(params)


class ExperimentRunner:
    """Executes the experiment registered for a RunConfig's subcommand."""

    def __init__(self, config: RunConfig, threads: Optional[int] = None):
        self.config = config
        self.threads = threads or config.threads
        self.experiment = create_experiment_from_registry(config)

    def _execute_grid(self, grid: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
        if self.threads <= 1 or len(grid) <= 1:
            return [self.experiment.execute_with_validation(params) for params in grid]

        config_json = self.config.model_dump_json()
        log_level = get_settings().log_level
        logger.info("Dispatching grid to worker pool", workers=self.threads, points=len(grid))
        with ProcessPoolExecutor(
            max_workers=self.threads,
            initializer=_init_worker,
            initargs=(log_level, dict(self.config.tolerances)),
        ) as pool:
            return list(pool.map(_run_point, repeat(config_json), grid))

    def write_csv(self, rows: List[Dict[str, Any]], path: Path) -> Path:
        frame = pd.DataFrame(rows, columns=self.experiment.columns)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
        return path

    def run(self) -> RunManifest:
        """
        Validate the config, evaluate every grid point and write outputs.

        Raises:
            ConfigError: If the configuration is unusable for the subcommand
            ValidationFailure: From the validate experiment, after outputs are written
        """
        subcommand = self.config.subcommand.value
        apply_overrides(self.config.tolerances)
        self.experiment.check_config()
        metadata = getattr(self.experiment, "_metadata", {})
        ignored = ignored_fields(self.config, metadata)
        if ignored:
            logger.warning("Config fields not used by this subcommand", subcommand=subcommand, fields=ignored)
        grid = self.experiment.grid()

        started_at = datetime.now(timezone.utc)
        start = time.perf_counter()
        seed = self.config.seed if metadata.get("seeded") else None
        logger.info("Experiment started", subcommand=subcommand, points=len(grid), seed=seed)

        rows = self.experiment.finalize(self._execute_grid(grid))

        out_dir = Path(self.config.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = self.write_csv(rows, out_dir / f"{subcommand}.csv")
        manifest = RunManifest(
            subcommand=self.config.subcommand,
            config=self.config.model_dump(mode="json"),
            code_version=code_version(),
            started_at=started_at,
            wall_clock_s=time.perf_counter() - start,
            rows=len(rows),
            csv_path=str(csv_path),
        )
        manifest_path = out_dir / f"{subcommand}.manifest.json"
        manifest_path.write_text(json.dumps(manifest.model_dump(mode="json"), indent=2))

        failures = sum(1 for row in rows if row.get("status") != "ok")
        logger.info(
            "Experiment finished",
            subcommand=subcommand, rows=len(rows), failures=failures,
            csv=str(csv_path), wall_clock_s=round(manifest.wall_clock_s, 3),
        )
        self.experiment.on_complete(rows, out_dir)
        return manifest
