# src/models/factories.py
"""
Factory patterns for building consistent model instances from the scaling
parameters (N, alpha, lambda_prior, lambda_post, nu).
"""
from typing import Optional, Sequence

from .base_models import DataSummary, NetworkSpec
from .enums import Regime
from .specialized_models import RegimeParams

# ==============================================================================
# NETWORK FACTORY
# ==============================================================================

class NetworkSpecFactory:
    """Factory for common architectures."""

    @classmethod
    def equal_widths(cls, n0: int, width: int, depth: int, sigma2: float = 1.0) -> NetworkSpec:
        """L hidden layers of width N."""
        if depth < 0:
            raise ValueError(f"depth must be >= 0, got {depth}")
        return NetworkSpec(n0=n0, widths=(width,) * depth, sigma2=sigma2)

    @classmethod
    def from_lambda_prior(cls, n0: int, width: int, lambda_prior: float, sigma2: float = 1.0) -> NetworkSpec:
        """
        Equal-width network with L = round(lambda_prior * N).

        Raises:
            ValueError: If the rounded depth is zero for a positive lambda_prior
        """
        depth = int(round(lambda_prior * width))
        if lambda_prior > 0 and depth == 0:
            raise ValueError(f"lambda_prior={lambda_prior} too small for width {width}")
        return cls.equal_widths(n0, width, depth, sigma2)

    @classmethod
    def from_widths(cls, n0: int, widths: Sequence[int], sigma2: float = 1.0) -> NetworkSpec:
        return NetworkSpec(n0=n0, widths=tuple(widths), sigma2=sigma2)

# ==============================================================================
# DATA FACTORY
# ==============================================================================

class DataSummaryFactory:
    """Factory for data summaries."""

    @classmethod
    def from_nu(cls, n0: int, p: int, nu: float) -> DataSummary:
        """Summary whose ||theta*||^2 = nu * P / N0."""
        return DataSummary(n0=n0, p=p, theta_star_norm2=nu * p / n0)

# ==============================================================================
# REGIME FACTORY
# ==============================================================================

class RegimeParamsFactory:
    """Derives regime parameters from concrete sizes."""

    @classmethod
    def for_regime(
        cls,
        regime: Regime,
        nu: float,
        width: int,
        p: int,
        depth: int,
        sigma2: float = 1.0,
        k: int = 0,
    ) -> RegimeParams:
        """
        Regime parameters for an equal-width network.

        alpha = P/N, lambda_prior = L/N and lambda_post = L*P/N; only the
        fields the regime reads are set.
        """
        if regime is Regime.FINITE_L:
            return RegimeParams(regime=regime, nu=nu, sigma2=sigma2, alpha=p / width, depth=depth, k=k)
        if regime is Regime.FIXED_LAMBDA_PRIOR:
            return RegimeParams(regime=regime, nu=nu, sigma2=sigma2, lambda_prior=depth / width, k=k)
        return RegimeParams(regime=regime, nu=nu, sigma2=sigma2, lambda_post=depth * p / width, k=k)

    @classmethod
    def from_spec(
        cls,
        regime: Regime,
        spec: NetworkSpec,
        data: DataSummary,
        k: int = 0,
        width: Optional[int] = None,
    ) -> RegimeParams:
        """
        Regime parameters for a general width vector.

        N defaults to the narrowest hidden layer; lambda_prior is the exact
        sum of 1/N_l.
        """
        n = width or spec.min_width
        if regime is Regime.FINITE_L:
            return RegimeParams(regime=regime, nu=data.nu, sigma2=spec.sigma2, alpha=data.p / n, depth=spec.depth, k=k)
        if regime is Regime.FIXED_LAMBDA_PRIOR:
            return RegimeParams(regime=regime, nu=data.nu, sigma2=spec.sigma2, lambda_prior=spec.lambda_prior, k=k)
        return RegimeParams(
            regime=regime, nu=data.nu, sigma2=spec.sigma2, lambda_post=data.p * spec.lambda_prior, k=k,
        )
