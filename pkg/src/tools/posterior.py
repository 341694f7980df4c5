# src/tools/posterior.py
"""
Zero-noise Bayesian evidence and predictive posterior of a deep linear network.

The prior over the end-to-end weights is a Gaussian scale mixture
theta | tau ~ N(0, tau I) with tau = 2M prod g_l, g_l ~ Gamma(N_l/2, 1). The
posterior keeps theta_parallel = theta* and rescales the perpendicular part,
so every perpendicular moment is a ratio of shifted G-functions:

    E_post[tau^k] = (2M)^k exp(Delta(log G)[k]).

Evidences are reported without the data-dependent constant that cancels
between models fitted to the same data.
"""
import math
import sys
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np
import structlog
from pydantic import ValidationError

from src.agent_library.errors import (
    DimensionMismatchError,
    InvalidArgsError,
    InvalidRegimeError,
    SeriesPrecisionLoss,
    TruncationNotConverged,
)
from src.config import get_settings
from src.models import (
    CharFnSeries,
    ComplexValue,
    DataSummary,
    GArgs,
    Geometry,
    NetworkSpec,
    PosteriorSummary,
    Regime,
    RegimeParams,
    RegimeParamsFactory,
    ShiftTarget,
)
from src.tools.asymptotics import t_star_for, variance_factor_limit, z_star_for
from src.tools.datagen import sigma_perp
from src.tools.gamma_kernel import log_gamma_real
from src.tools.meijer_g import delta_log_g, log_meijer_g, scale_m

logger = structlog.get_logger()

LOG_4PI = math.log(4.0 * math.pi)
EPS = sys.float_info.epsilon


def _g_args(spec: NetworkSpec, data: DataSummary, k_widths: int = 0, k_data: int = 0) -> GArgs:
    if data.theta_star_norm2 <= 0:
        raise InvalidArgsError("The posterior needs ||theta*||^2 > 0")
    try:
        return GArgs.from_summary(spec, data, k_widths=k_widths, k_data=k_data)
    except ValidationError as e:
        raise InvalidArgsError(str(e)) from e

# ==============================================================================
# EVIDENCE
# ==============================================================================

def log_evidence_exact(spec: NetworkSpec, data: DataSummary, tol: Optional[float] = None) -> float:
    """(P/2) log(4 pi / ||theta*||^2) - sum_l log Gamma(N_l/2) + log G."""
    args = _g_args(spec, data)
    log_g = log_meijer_g(args, tol=tol).log_value
    gamma_norm = float(np.sum(log_gamma_real(np.asarray(spec.widths, dtype=np.float64) / 2.0))) if spec.widths else 0.0
    return 0.5 * data.p * (LOG_4PI - math.log(data.theta_star_norm2)) - gamma_norm + log_g


def log_evidence_linear(spec: NetworkSpec, data: DataSummary) -> float:
    """Closed-form evidence of the L = 0 model: (P/2) log(2 pi N0 / sigma^2) - N0 ||theta*||^2 / (2 sigma^2)."""
    if spec.depth != 0:
        raise InvalidArgsError("log_evidence_linear applies to networks without hidden layers")
    return 0.5 * data.p * math.log(2.0 * math.pi * data.n0 / spec.sigma2) - data.n0 * data.theta_star_norm2 / (2.0 * spec.sigma2)


def log_evidence_asymptotic(
    params: RegimeParams,
    p: int,
    n0: int,
    width: Optional[int] = None,
) -> float:
    """
    Large-width evidence for one regime.

    finite_L:
        (P/2)[log(P/2) + log(1 + z*/alpha) - (1 + z*/alpha) - log(||theta*||^2/4 pi)]
        + (N L/2)[log(1 + z*) - z*]
    fixed_lambda_prior:
        (P/2)[log(P/2) - 1 - log(||theta*||^2/4 pi)]
        - (1/2) log(P/2) - (1/2) log(2 lambda) - (lambda + log nu)^2 / (4 lambda)
    fixed_lambda_post:
        (P/2)[log(P/2) - 1 - log(||theta*||^2/4 pi)]
        + (P/2)[log(1 + t*) - t* - lambda_post t*^2 / 2]

    Args:
        params: Regime parameters
        p: Number of training points
        n0: Input dimension, fixes ||theta*||^2 = nu P / N0
        width: Hidden width N, needed by finite_L when depth > 0
    """
    half_p = p / 2.0
    log_norm = math.log(params.nu * p / n0) - LOG_4PI

    if params.regime is Regime.FINITE_L:
        z = z_star_for(params)
        ratio = 1.0 + z / params.alpha
        value = half_p * (math.log(half_p) + math.log(ratio) - ratio - log_norm)
        if params.depth:
            if width is None:
                raise InvalidRegimeError("finite_L evidence needs the hidden width N")
            value += 0.5 * width * params.depth * (math.log1p(z) - z)
        return value

    if params.sigma2 != 1.0:
        raise InvalidRegimeError(f"Regime {params.regime.value} requires sigma2 = 1")
    value = half_p * (math.log(half_p) - 1.0 - log_norm)

    if params.regime is Regime.FIXED_LAMBDA_PRIOR:
        lam = params.lambda_prior
        value -= 0.5 * math.log(half_p) + 0.5 * math.log(2.0 * lam)
        value -= (lam + math.log(params.nu)) ** 2 / (4.0 * lam)
        return value

    t = t_star_for(params)
    return value + half_p * (math.log1p(t) - t - 0.5 * params.lambda_post * t * t)

# ==============================================================================
# PREDICTIVE MOMENTS
# ==============================================================================

def posterior_mean(theta_star: np.ndarray, x: np.ndarray) -> float:
    """theta*^T x."""
    theta_star = np.asarray(theta_star, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if theta_star.shape != x.shape:
        raise DimensionMismatchError(f"theta* has shape {theta_star.shape}, x has shape {x.shape}")
    return float(theta_star @ x)


def perp_scale_moment(spec: NetworkSpec, data: DataSummary, k: int, tol: Optional[float] = None) -> float:
    """E_post[tau^k] = (2M)^k exp(Delta(log G)[k])."""
    if k < 0:
        raise InvalidArgsError(f"k must be >= 0, got {k}")
    log_two_m = scale_m(spec) - math.log(2.0)
    return math.exp(k * log_two_m + delta_log_g(_g_args(spec, data), k, tol=tol))


def posterior_variance_exact(
    spec: NetworkSpec,
    data: DataSummary,
    x_perp_norm2: float,
    tol: Optional[float] = None,
) -> float:
    """2M ||x_perp||^2 exp(Delta(log G)[1])."""
    if x_perp_norm2 < 0:
        raise InvalidArgsError(f"||x_perp||^2 must be >= 0, got {x_perp_norm2}")
    if x_perp_norm2 == 0:
        return 0.0
    return x_perp_norm2 * perp_scale_moment(spec, data, 1, tol=tol)


def posterior_variance_data_shift(
    spec: NetworkSpec,
    data: DataSummary,
    x_perp_norm2: float,
    tol: Optional[float] = None,
) -> float:
    """
    Same variance through the data-index shift:
    (||x_perp||^2 / 2) ||theta*||^2 G(P/2 - 1) / G(P/2).

    z does not depend on P, so G(P/2 - 1) is the G-function of P - 2 points
    with the same ||theta*||^2. Needs P >= 3.
    """
    if data.p < 3:
        raise InvalidArgsError("The data-shift variance form needs P >= 3")
    if x_perp_norm2 == 0:
        return 0.0
    lowered = GArgs(theta_star_norm2=data.theta_star_norm2, alpha0=(data.p - 2) / data.n0, spec=spec)
    log_ratio = -delta_log_g(lowered, 1, target=ShiftTarget.DATA, tol=tol)
    return 0.5 * x_perp_norm2 * data.theta_star_norm2 * math.exp(log_ratio)


def variance_factor_exact(spec: NetworkSpec, data: DataSummary, tol: Optional[float] = None) -> float:
    """c_N = Var N0 / (nu ||x_perp||^2) at ||x_perp||^2 = 1."""
    return posterior_variance_exact(spec, data, 1.0, tol=tol) * data.n0 / data.nu

# ==============================================================================
# CHARACTERISTIC FUNCTION
# ==============================================================================

LOG_FLOAT_MAX = math.log(sys.float_info.max)
# Precision of the log-magnitudes; the sum adds the bits its peak term needs.
LOG_TERM_PREC = 256
SUM_GUARD_BITS = 106
MAX_RELATIVE_ERROR = 1e-4


class _SeriesTerms:
    """
    Log-magnitudes k log(M ||t_perp||^2) - log k! + Delta(log G)[k] of the series terms.

    Each width shift is evaluated once, in index order, and cached.
    """

    def __init__(self, spec: NetworkSpec, data: DataSummary, t_perp_norm2: float):
        self._deep = spec.depth > 0
        self._args = _g_args(spec, data)
        self._base = log_meijer_g(self._args).log_value if self._deep else 0.0
        self._quad_tol = get_settings().quad_tol
        with mpmath.workprec(LOG_TERM_PREC):
            self._log_x = mpmath.mpf(scale_m(spec) - math.log(4.0)) + mpmath.log(t_perp_norm2)
        self._logs: List[mpmath.mpf] = []
        self._errors: List[float] = []

    def __getitem__(self, k: int) -> mpmath.mpf:
        while len(self._logs) <= k:
            self._append(len(self._logs))
        return self._logs[k]

    def _append(self, k: int) -> None:
        delta, error = 0.0, 0.0
        if self._deep and k > 0:
            log_g = log_meijer_g(self._args.shifted(k, ShiftTarget.WIDTHS)).log_value
            delta = log_g - self._base
            error = self._quad_tol + EPS * (abs(log_g) + abs(self._base))
        with mpmath.workprec(LOG_TERM_PREC):
            value = k * self._log_x - mpmath.loggamma(k + 1) + delta
        if value > LOG_FLOAT_MAX:
            logger.error("Char-fn term outside double range", k=k, log_term=float(value))
            raise SeriesPrecisionLoss(f"Series term {k} has log-magnitude {float(value):.1f}, beyond double range")
        self._logs.append(value)
        self._errors.append(error + abs(float(value)) * 2.0 ** -LOG_TERM_PREC)

    def partial_sum(self, count: int) -> Tuple[float, float]:
        """Sum of the first count signed terms and the error their log-magnitudes carry into it."""
        logs = [self[k] for k in range(count)]
        peak = float(max(logs))
        prec = SUM_GUARD_BITS + max(0, math.ceil(peak / math.log(2.0)))
        with mpmath.workprec(prec):
            total = mpmath.fsum(mpmath.exp(v) if k % 2 == 0 else -mpmath.exp(v) for k, v in enumerate(logs))
            error = mpmath.fsum(mpmath.exp(v) * e for v, e in zip(logs, self._errors))
        return float(total), float(error) + count * 2.0 ** -SUM_GUARD_BITS


def _series_value(
    terms: _SeriesTerms,
    count: int,
    phase: complex,
    series_tol: float,
    check_truncation: bool,
) -> CharFnSeries:
    partial, error = terms.partial_sum(count)
    bound = float(mpmath.exp(terms[count]))

    if check_truncation and bound > series_tol * abs(partial):
        raise TruncationNotConverged(
            f"First omitted term {bound:.3e} exceeds {series_tol:.1e} x |partial sum| after {count} terms"
        )
    if error > MAX_RELATIVE_ERROR * abs(partial):
        logger.error("Char-fn series lost precision", terms=count, error=error, partial=partial)
        raise SeriesPrecisionLoss(
            f"Propagated error {error:.3e} exceeds {MAX_RELATIVE_ERROR:.0e} x |partial sum| {abs(partial):.3e}"
        )
    return CharFnSeries(
        value=ComplexValue.from_complex(phase * partial),
        terms=count,
        truncation_bound=bound,
        error_bound=error,
    )


def char_fn_partial_sum(
    spec: NetworkSpec,
    data: DataSummary,
    t_par_inner: float,
    t_perp_norm2: float,
    K: int,
    tol: Optional[float] = None,
    check_truncation: bool = True,
) -> CharFnSeries:
    """
    Z(t)/Z(0) = exp(-i <theta*, t>) sum_{k<K} (-1)^k (M ||t_perp||^2)^k exp(Delta(log G)[k]) / k!.

    The signed terms are summed in mpmath at the precision their largest
    magnitude requires, so the cancellation itself costs nothing. What is left
    is the error of each Delta(log G)[k], which is propagated into error_bound.

    Args:
        t_par_inner: <theta*, t>
        t_perp_norm2: ||t_perp||^2
        K: Number of terms kept
        tol: Series tolerance; defaults to the configured series_tol
        check_truncation: Raise when the first omitted term is too large

    Raises:
        TruncationNotConverged: If |term K| > tol * |partial sum| and check_truncation is set
        SeriesPrecisionLoss: If a term leaves double range or the propagated error
            exceeds MAX_RELATIVE_ERROR * |partial sum|
    """
    if K < 1:
        raise InvalidArgsError(f"K must be >= 1, got {K}")
    if t_perp_norm2 < 0:
        raise InvalidArgsError(f"||t_perp||^2 must be >= 0, got {t_perp_norm2}")
    series_tol = get_settings().series_tol if tol is None else tol

    phase = complex(math.cos(t_par_inner), -math.sin(t_par_inner))
    if t_perp_norm2 == 0:
        return CharFnSeries(value=ComplexValue.from_complex(phase), terms=K, truncation_bound=0.0)
    return _series_value(_SeriesTerms(spec, data, t_perp_norm2), K, phase, series_tol, check_truncation)


def char_fn(
    spec: NetworkSpec,
    data: DataSummary,
    t_par_inner: float,
    t_perp_norm2: float,
    tol: Optional[float] = None,
) -> CharFnSeries:
    """Series summed until the next term drops below tol * |sum| or the term cap is reached."""
    settings = get_settings()
    series_tol = settings.series_tol if tol is None else tol
    if t_perp_norm2 < 0:
        raise InvalidArgsError(f"||t_perp||^2 must be >= 0, got {t_perp_norm2}")

    phase = complex(math.cos(t_par_inner), -math.sin(t_par_inner))
    if t_perp_norm2 == 0:
        return CharFnSeries(value=ComplexValue.from_complex(phase), terms=1, truncation_bound=0.0)

    terms = _SeriesTerms(spec, data, t_perp_norm2)
    log_tol = math.log(series_tol)
    peak = -math.inf
    for count in range(1, settings.series_max_terms + 1):
        peak = max(peak, float(terms[count - 1]))
        # |partial sum| <= count * exp(peak)
        if float(terms[count]) > log_tol + peak + math.log(count):
            continue
        try:
            return _series_value(terms, count, phase, series_tol, check_truncation=True)
        except TruncationNotConverged:
            continue

    logger.error("Char-fn series not converged", terms=settings.series_max_terms, t_perp_norm2=t_perp_norm2)
    raise TruncationNotConverged(
        f"Series did not reach {series_tol:.1e} x |partial sum| within {settings.series_max_terms} terms"
    )

# ==============================================================================
# PREDICTIVE GAUSSIAN
# ==============================================================================

def regime_params_for(regime: Regime, spec: NetworkSpec, data: DataSummary) -> RegimeParams:
    try:
        return RegimeParamsFactory.from_spec(regime, spec, data)
    except ValidationError as e:
        raise InvalidRegimeError(f"Cannot form {regime.value} parameters: {e}") from e


def predictive_gaussian(
    spec: NetworkSpec,
    data: DataSummary,
    geometry: Geometry,
    test_points: Sequence[Sequence[float]],
    regime: Regime,
) -> PosteriorSummary:
    """
    Asymptotic predictive posterior N(theta*^T x, nu c Sigma_perp (1 - alpha0)) at the test points.

    Args:
        spec: Network
        data: Summary of the fitted data
        geometry: Interpolant and col(X) basis of the same data
        test_points: Rows of length N0
        regime: Which large-width limit supplies c

    Raises:
        InvalidRegimeError: If the network does not satisfy the regime's constraints
        DimensionMismatchError: If a test point is not N0-dimensional
    """
    points = np.atleast_2d(np.asarray(test_points, dtype=np.float64))
    if points.shape[1] != data.n0 or geometry.theta_star.shape[0] != data.n0:
        raise DimensionMismatchError(f"Test points must have dimension N0={data.n0}, got {points.shape[1]}")
    if regime is not Regime.FINITE_L and spec.depth == 0:
        raise InvalidRegimeError(f"Regime {regime.value} needs at least one hidden layer")

    params = regime_params_for(regime, spec, data)
    c = variance_factor_limit(params)
    covariance = data.nu * c * (1.0 - data.alpha0) * sigma_perp(points, geometry)
    log_z = log_evidence_asymptotic(params, data.p, data.n0, width=spec.min_width if spec.depth else None)

    logger.debug("Predictive Gaussian", regime=regime.value, c=c, points=points.shape[0])
    return PosteriorSummary(
        mean=[float(v) for v in points @ geometry.theta_star],
        covariance=covariance.tolist(),
        variance_factor_c=c,
        log_evidence=log_z,
        nu=data.nu,
        regime=regime,
    )
