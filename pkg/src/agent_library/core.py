# src/agent_library/core.py
"""
Core base class for the experiment SDK.
An experiment turns a RunConfig into grid points and each grid point into one CSV row.
"""
import math
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List

import structlog
from pydantic import ValidationError

from src.agent_library.errors import ConfigError, InvalidArgsError, NumericFailure
from src.models import RunConfig, RunStatus

logger = structlog.get_logger()


class BaseExperiment(ABC):
    """Base class for every CLI subcommand."""

    columns: List[str] = []

    def __init__(self, config: RunConfig):
        self.config = config
        self.experiment_name = getattr(self, "_experiment_name", self.__class__.__name__)

    def check_config(self) -> None:
        """Override to reject configurations before any computation."""

    @abstractmethod
    def grid(self) -> List[Dict[str, Any]]:
        """Parameters of every grid point, in output order."""

    @abstractmethod
    def execute(self, params: Dict[str, Any]) -> Dict[str, Any]:
        """Compute one row."""

    def finalize(self, rows: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
        """Override for columns that depend on the whole grid."""
        return rows

    def on_complete(self, rows: List[Dict[str, Any]], out_dir: Path) -> None:
        """Override to write extra artifacts after the CSV and manifest exist."""

    def failure_row(self, params: Dict[str, Any], error: Exception) -> Dict[str, Any]:
        row = {column: params.get(column, math.nan) for column in self.columns}
        row["status"] = RunStatus.NUMERIC_FAILURE.value
        return row

    def execute_with_validation(self, params: Dict[str, Any]) -> Dict[str, Any]:
        """Execute one grid point with input/output validation; numeric failures become status rows."""
        GridPointSchema = getattr(self, "_grid_point_schema", None)
        if GridPointSchema:
            try:
                params = GridPointSchema.model_validate(params).model_dump()
            except ValidationError as e:
                logger.error("Grid point failed validation", experiment=self.experiment_name, error=str(e))
                raise ConfigError(f"Invalid grid point for {self.experiment_name}: {e}") from e

        try:
            row = self.execute(params)
        except NumericFailure as e:
            logger.error("Grid point failed", experiment=self.experiment_name, params=params, error=str(e))
            return self.failure_row(params, e)

        RowSchema = getattr(self, "_row_schema", None)
        if RowSchema:
            try:
                row = RowSchema.model_validate(row).model_dump(mode="json")
            except ValidationError as e:
                logger.error("Experiment produced an invalid row", experiment=self.experiment_name, error=str(e))
                raise InvalidArgsError(f"{self.experiment_name} produced an invalid row: {e}") from e
        row.setdefault("status", RunStatus.OK.value)
        return row
