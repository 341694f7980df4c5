# src/models/specialized_models.py
"""
Result models produced by the numeric tools.
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .base_models import ComplexValue
from .enums import Regime, SaddleKind

# ==============================================================================
# QUADRATURE AND SADDLES
# ==============================================================================

class QuadratureReport(BaseModel):
    """Outcome of one contour quadrature."""
    model_config = ConfigDict(frozen=True)

    log_value: float = Field(..., description="log of the target G-function")
    log_density: float = Field(..., description="log Den_{sum log phi}(0) before the G prefactors")
    imag_residual: float = Field(..., ge=0, description="|Im integral| / |Re integral|")
    panels: int = Field(..., ge=1, description="Panels used by the adaptive rule")
    truncation_T: float = Field(..., gt=0, description="Half-length of the integration window")
    shift_c: float = Field(..., description="Vertical offset of the contour")
    error_estimate: float = Field(default=0.0, ge=0, description="Relative error estimate of the integral")


class SaddleSolution(BaseModel):
    """Root of a monotone saddle-point equation."""
    model_config = ConfigDict(frozen=True)

    root: float
    residual: float
    iterations: int = Field(..., ge=0)
    bracket: Tuple[float, float]
    kind: SaddleKind

    @model_validator(mode="after")
    def check_inside_bracket(self) -> "SaddleSolution":
        lo, hi = self.bracket
        if not lo < self.root < hi:
            raise ValueError(f"Root {self.root} not strictly inside bracket ({lo}, {hi})")
        return self


class ZetaSolution(BaseModel):
    """Leading saddle zeta* and its first-order correction zeta**."""
    model_config = ConfigDict(frozen=True)

    zeta_star: float
    zeta_star2: float
    scale_n: int = Field(..., ge=1, description="Width scale N the zeta variables are measured in")
    solution: SaddleSolution

# ==============================================================================
# REGIMES
# ==============================================================================

class RegimeParams(BaseModel):
    """Parameters of one asymptotic regime."""
    model_config = ConfigDict(frozen=True)

    regime: Regime
    nu: float = Field(..., gt=0)
    sigma2: float = Field(default=1.0, gt=0)
    alpha: Optional[float] = Field(None, gt=0, description="P/N, regime finite_L")
    lambda_prior: Optional[float] = Field(None, gt=0, description="L/N, regime fixed_lambda_prior")
    lambda_post: Optional[float] = Field(None, ge=0, description="LP/N, regime fixed_lambda_post")
    depth: Optional[int] = Field(None, ge=0, description="L, regime finite_L")
    k: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def check_regime_fields(self) -> "RegimeParams":
        if self.regime is Regime.FINITE_L:
            if self.alpha is None or self.depth is None:
                raise ValueError("finite_L needs alpha and depth")
        elif self.regime is Regime.FIXED_LAMBDA_PRIOR:
            if self.lambda_prior is None:
                raise ValueError("fixed_lambda_prior needs lambda_prior")
            if self.sigma2 != 1.0:
                raise ValueError("fixed_lambda_prior requires sigma2 = 1")
        elif self.regime is Regime.FIXED_LAMBDA_POST:
            if self.lambda_post is None:
                raise ValueError("fixed_lambda_post needs lambda_post")
            if self.sigma2 != 1.0:
                raise ValueError("fixed_lambda_post requires sigma2 = 1")
        return self

# ==============================================================================
# POSTERIOR AND MODEL SELECTION
# ==============================================================================

class PosteriorSummary(BaseModel):
    """Gaussian predictive posterior at a set of test points."""

    mean: List[float] = Field(..., description="theta*^T x per test point")
    covariance: List[List[float]] = Field(..., description="nu * c * (1 - alpha0) * Sigma_perp")
    variance_factor_c: float = Field(..., ge=0)
    log_evidence: float
    nu: float = Field(..., gt=0)
    regime: Regime

    @property
    def variance(self) -> List[float]:
        return [row[i] for i, row in enumerate(self.covariance)]


class CharFnSeries(BaseModel):
    """Truncated characteristic-function series Z(t)/Z(0)."""

    value: ComplexValue
    terms: int = Field(..., ge=1)
    truncation_bound: float = Field(..., ge=0, description="Magnitude of the first omitted term")
    error_bound: float = Field(0.0, ge=0, description="Error of the kept terms propagated through the sum")


class SelectionReport(BaseModel):
    """Model-selection optima and evidence gaps."""

    sigma_star2: float = Field(..., gt=0)
    l_star: Optional[float] = Field(None, description="None when sigma2 = 1 (no finite optimum)")
    lambda_prior_star: float = Field(..., ge=0)
    evidence_gap: float = Field(..., le=0, description="Per-unit-N log-evidence deficit of finite depth")
    d_logZ_d_lambda_post: float = Field(..., ge=0)

# ==============================================================================
# MONTE CARLO
# ==============================================================================

class McEstimate(BaseModel):
    """Monte Carlo mean with its standard error."""
    model_config = ConfigDict(frozen=True)

    value: float
    std_error: float = Field(..., ge=0)
    n_samples: int = Field(..., ge=1)
    seed: int = Field(..., ge=0, lt=2**64)

    def z_score(self, target: float) -> float:
        if self.std_error == 0:
            return 0.0 if target == self.value else math.inf
        return (self.value - target) / self.std_error


class DoubleDescentPoint(BaseModel):
    """Monte Carlo generalization error at one alpha0."""

    alpha0: float
    p: int
    error: McEstimate
    bias: McEstimate
    variance: McEstimate
    closed_form: float
    finite_size: float = Field(..., description="Exact expectation at this (N0, P)")

# ==============================================================================
# DATASETS
# ==============================================================================

@dataclass(frozen=True)
class Dataset:
    """Training set with inputs as columns of x (N0 x P)."""
    x: np.ndarray
    y: np.ndarray
    seed: int
    sigma_eps: float
    v0: Optional[np.ndarray] = None

    @property
    def n0(self) -> int:
        return int(self.x.shape[0])

    @property
    def p(self) -> int:
        return int(self.x.shape[1])


@dataclass(frozen=True)
class Geometry:
    """Minimum-norm interpolant and an orthonormal basis of col(X)."""
    theta_star: np.ndarray
    theta_star_norm2: float
    rank: int
    basis: np.ndarray = field(repr=False)
