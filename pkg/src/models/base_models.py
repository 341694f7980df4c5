# src/models/base_models.py
"""
Base models: network architecture, data summaries and Meijer-G arguments.
These are the inputs every numeric tool consumes.
"""
import math
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

from .enums import ShiftTarget

# ==============================================================================
# COMPLEX SCALARS
# ==============================================================================

class ComplexValue(BaseModel):
    """JSON-friendly complex number."""
    model_config = ConfigDict(frozen=True)

    re: float = Field(..., description="Real part")
    im: float = Field(..., description="Imaginary part")

    @model_validator(mode="after")
    def check_finite(self) -> "ComplexValue":
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError(f"Non-finite complex value ({self.re}, {self.im})")
        return self

    @classmethod
    def from_complex(cls, value: complex) -> "ComplexValue":
        return cls(re=float(value.real), im=float(value.imag))

    def to_complex(self) -> complex:
        return complex(self.re, self.im)

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)

# ==============================================================================
# ARCHITECTURE AND PRIOR
# ==============================================================================

class NetworkSpec(BaseModel):
    """Deep linear network with scalar output and Gaussian prior on weights."""
    model_config = ConfigDict(frozen=True)

    n0: int = Field(..., ge=1, description="Input dimension N0")
    widths: Tuple[int, ...] = Field(default=(), description="Hidden widths N_1..N_L; empty means L = 0")
    sigma2: float = Field(default=1.0, gt=0, description="Prior variance scale sigma^2")

    @field_validator("widths", mode="before")
    @classmethod
    def coerce_widths(cls, v):
        return tuple(int(w) for w in v)

    @field_validator("widths")
    @classmethod
    def validate_widths(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(w < 1 for w in v):
            raise ValueError(f"All hidden widths must be >= 1, got {list(v)}")
        return v

    @property
    def depth(self) -> int:
        """Number of hidden layers L."""
        return len(self.widths)

    @property
    def all_widths(self) -> Tuple[int, ...]:
        """(N0, N1, ..., NL)."""
        return (self.n0,) + self.widths

    @property
    def min_width(self) -> int:
        return min(self.widths) if self.widths else self.n0

    @property
    def lambda_prior(self) -> float:
        """Effective prior depth sum(1/N_l) over hidden layers."""
        return float(sum(1.0 / w for w in self.widths))

    def with_sigma2(self, sigma2: float) -> "NetworkSpec":
        return NetworkSpec(n0=self.n0, widths=self.widths, sigma2=sigma2)

# ==============================================================================
# DATA SUMMARY
# ==============================================================================

class DataSummary(BaseModel):
    """Sufficient statistics of an interpolated training set."""
    model_config = ConfigDict(frozen=True)

    n0: int = Field(..., ge=1, description="Input dimension N0")
    p: int = Field(..., ge=1, description="Number of training points P")
    theta_star_norm2: float = Field(..., ge=0, description="Squared norm of the minimum-norm interpolant")

    @model_validator(mode="after")
    def check_p_le_n0(self) -> "DataSummary":
        if self.p > self.n0:
            raise ValueError(f"P={self.p} exceeds N0={self.n0}; the posterior is degenerate")
        return self

    @computed_field
    @property
    def alpha0(self) -> float:
        return self.p / self.n0

    @computed_field
    @property
    def nu(self) -> float:
        """Signal-strength estimate ||theta*||^2 / alpha0."""
        return self.theta_star_norm2 / self.alpha0

# ==============================================================================
# MEIJER-G ARGUMENTS
# ==============================================================================

class GArgs(BaseModel):
    """
    One instance of G^{L+1,0}_{0,L+1}(||theta*||^2/4M; -; P/2 + k_data, N_l/2 + k_widths).

    At most one of the two shifts may be nonzero.
    """
    model_config = ConfigDict(frozen=True)

    theta_star_norm2: float = Field(..., gt=0)
    alpha0: float = Field(..., gt=0, le=1)
    spec: NetworkSpec
    k_widths: int = Field(default=0, ge=0, le=1_000_000)
    k_data: int = Field(default=0, ge=0, le=1_000_000)

    @model_validator(mode="after")
    def check_single_shift(self) -> "GArgs":
        if self.k_widths and self.k_data:
            raise ValueError("Only one of k_widths and k_data may be nonzero")
        return self

    @classmethod
    def from_summary(cls, spec: NetworkSpec, data: DataSummary, k_widths: int = 0, k_data: int = 0) -> "GArgs":
        if spec.n0 != data.n0:
            raise ValueError(f"NetworkSpec.n0={spec.n0} disagrees with DataSummary.n0={data.n0}")
        return cls(
            theta_star_norm2=data.theta_star_norm2,
            alpha0=data.alpha0,
            spec=spec,
            k_widths=k_widths,
            k_data=k_data,
        )

    @property
    def p(self) -> float:
        return self.alpha0 * self.spec.n0

    @property
    def shift_target(self) -> ShiftTarget:
        return ShiftTarget.DATA if self.k_data else ShiftTarget.WIDTHS

    def shifted(self, k: int, target: ShiftTarget = ShiftTarget.WIDTHS) -> "GArgs":
        """Copy with the shift on ``target`` set to k and the other cleared."""
        if target is ShiftTarget.DATA:
            return GArgs(theta_star_norm2=self.theta_star_norm2, alpha0=self.alpha0, spec=self.spec, k_data=k)
        return GArgs(theta_star_norm2=self.theta_star_norm2, alpha0=self.alpha0, spec=self.spec, k_widths=k)

    def b_parameters(self) -> List[float]:
        """The multiset {P/2 + k_data, N_l/2 + k_widths}."""
        return [self.p / 2 + self.k_data] + [w / 2 + self.k_widths for w in self.spec.widths]
