# src/models/aggregation_models.py
"""
Models for experiment configuration, manifests and validation reports.
Used by the CLI and the experiment runner.
"""
from datetime import datetime
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from .enums import GridScale, Regime, Subcommand, SweepVariable

# ==============================================================================
# GRIDS
# ==============================================================================

class GridSpec(BaseModel):
    """{min, max, count, scale} grid description."""

    min: float
    max: float
    count: int = Field(..., ge=1)
    scale: GridScale = GridScale.LINEAR

    @model_validator(mode="after")
    def check_range(self) -> "GridSpec":
        if self.max < self.min:
            raise ValueError(f"Grid max {self.max} below min {self.min}")
        if self.scale is GridScale.LOG and self.min <= 0:
            raise ValueError("Log-scaled grids need min > 0")
        return self

    def values(self) -> List[float]:
        if self.count == 1:
            return [float(self.min)]
        if self.scale is GridScale.LOG:
            return [float(v) for v in np.geomspace(self.min, self.max, self.count)]
        return [float(v) for v in np.linspace(self.min, self.max, self.count)]

# ==============================================================================
# RUN CONFIGURATION
# ==============================================================================

class RunConfig(BaseModel):
    """
    Configuration of one CLI run.

    Fields irrelevant to a subcommand are ignored; each experiment validates
    the ones it needs before computing anything.
    """

    subcommand: Subcommand
    # sizes
    n0: Optional[int] = Field(None, ge=1)
    p: Optional[int] = Field(None, ge=1)
    widths: Optional[List[int]] = Field(None, description="Explicit hidden widths")
    width: Optional[int] = Field(None, ge=1, description="Equal hidden width N")
    depth: Optional[int] = Field(None, ge=0, description="Equal-width depth L")
    n_values: Optional[List[int]] = Field(None, description="Width sequence for posterior-variance")
    # regime
    regime: Optional[Regime] = None
    nu: float = Field(default=2.0, gt=0)
    sigma2: float = Field(default=1.0, gt=0)
    alpha: Optional[float] = Field(None, gt=0, description="P/N")
    alpha0: float = Field(default=0.5, gt=0, le=1)
    lambda_prior: Optional[float] = Field(None, gt=0)
    lambda_post: Optional[float] = Field(None, ge=0)
    sweep: Optional[SweepVariable] = None
    grid: Optional[GridSpec] = None
    # generative model and Monte Carlo
    sigma_eps2: float = Field(default=0.25, ge=0)
    alpha0_grid: Optional[List[float]] = None
    trials: int = Field(default=2000, ge=1)
    test_points: int = Field(default=16, ge=1)
    n_samples: int = Field(default=1_000_000, ge=1)
    x_perp_norm2: float = Field(default=1.0, ge=0)
    # run
    seed: int = Field(default=0, ge=0, lt=2**64)
    out: str = Field(default="out")
    threads: int = Field(default=1, ge=1)
    tolerances: Dict[str, float] = Field(default_factory=dict, description="Overrides such as quad_tol")

    @field_validator("widths", "n_values")
    @classmethod
    def validate_positive_ints(cls, v: Optional[List[int]]) -> Optional[List[int]]:
        if v is not None and any(int(w) < 1 for w in v):
            raise ValueError(f"Entries must be >= 1, got {v}")
        return v

    @field_validator("tolerances")
    @classmethod
    def validate_tolerances(cls, v: Dict[str, float]) -> Dict[str, float]:
        known = {"quad_tol", "series_tol"}
        unknown = set(v) - known
        if unknown:
            raise ValueError(f"Unknown tolerance overrides: {sorted(unknown)}")
        return v

# ==============================================================================
# OUTPUT RECORDS
# ==============================================================================

class RunManifest(BaseModel):
    """JSON sidecar written next to every CSV."""

    subcommand: Subcommand
    config: Dict[str, Any]
    code_version: str
    started_at: datetime
    wall_clock_s: float = Field(..., ge=0)
    rows: int = Field(..., ge=0)
    csv_path: Optional[str] = None


class ValidationCheck(BaseModel):
    """One invariant check with its measured deviation."""

    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""


class ValidationReport(BaseModel):
    """Outcome of the validate subcommand."""

    checks: List[ValidationCheck] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failed(self) -> List[ValidationCheck]:
        return [check for check in self.checks if not check.passed]
