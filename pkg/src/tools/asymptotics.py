# src/tools/asymptotics.py
"""
Closed-form large-width expansions of log G and of the shift differences
Delta(log G)[k] = log G(N_l/2 + k) - log G(N_l/2).

Three regimes:
    finite_L            L fixed, P = alpha N, N -> inf
    fixed_lambda_prior  L = lambda_prior N, P fixed, sigma^2 = 1
    fixed_lambda_post   L P / N = lambda_post fixed, sigma^2 = 1

All terms down to O(1) are kept; the remainder is O~(1/N).
"""
import math
from typing import Optional, Sequence

import structlog

from src.agent_library.errors import InvalidRegimeError
from src.models import Regime, RegimeParams
from src.tools.saddle import solve_t_star, solve_z_star

logger = structlog.get_logger()

HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _require(params: RegimeParams, regime: Regime) -> None:
    if params.regime is not regime:
        raise InvalidRegimeError(f"Expected regime {regime.value}, got {params.regime.value}")
    if regime is not Regime.FINITE_L and params.sigma2 != 1.0:
        raise InvalidRegimeError(f"Regime {regime.value} requires sigma2 = 1, got {params.sigma2}")


def _shift(params: RegimeParams, k: Optional[int]) -> int:
    k = params.k if k is None else k
    if k < 0:
        raise InvalidRegimeError(f"Shift k must be >= 0, got {k}")
    return k

# ==============================================================================
# CASE A: FINITE DEPTH
# ==============================================================================

def z_star_for(params: RegimeParams) -> float:
    _require(params, Regime.FINITE_L)
    return solve_z_star(params.nu, params.sigma2, params.alpha, params.depth).root


def log_g_case_a(N: int, params: RegimeParams, k: Optional[int] = None) -> float:
    """
    log G for L hidden layers of width N and P = alpha N at width shift k.

    Leading part:
        (N alpha/2)[log(N alpha/2) + log(1 + z*/alpha) - (1 + z*/alpha)]
        + (N L/2)[log(N/2) + log(1 + z*) - (1 + z*)]
    plus the O(1) block
        (L(2k-1)/2)[log(N/2) + log(1 + z*)] + (L/2) log 2 pi
        - (1/2) log(1 + L (alpha + z*)/(1 + z*)).
    """
    _require(params, Regime.FINITE_L)
    if N < 2:
        raise InvalidRegimeError(f"Width N must be >= 2, got {N}")
    k = _shift(params, k)
    alpha, L = params.alpha, params.depth
    z = z_star_for(params)

    half_p = N * alpha / 2.0
    half_n = N / 2.0
    ratio = 1.0 + z / alpha
    leading = half_p * (math.log(half_p) + math.log(ratio) - ratio)
    leading += L * half_n * (math.log(half_n) + math.log1p(z) - (1.0 + z))
    order_one = 0.5 * L * (2 * k - 1) * (math.log(half_n) + math.log1p(z))
    order_one += L * HALF_LOG_2PI
    order_one -= 0.5 * math.log1p(L * (alpha + z) / (1.0 + z))
    return leading + order_one


def delta_log_g_case_a(N: int, params: RegimeParams, k: Optional[int] = None) -> float:
    """k L [log(N/2) + log(1 + z*)]."""
    _require(params, Regime.FINITE_L)
    k = _shift(params, k)
    if k == 0 or params.depth == 0:
        return 0.0
    z = z_star_for(params)
    return k * params.depth * (math.log(N / 2.0) + math.log1p(z))

# ==============================================================================
# CASE B: FIXED PRIOR DEPTH
# ==============================================================================

def _prior_depth(widths: Sequence[int]) -> float:
    if not widths:
        raise InvalidRegimeError("fixed_lambda_prior needs at least one hidden layer")
    return float(sum(1.0 / w for w in widths))


def log_g_case_b(widths: Sequence[int], P: int, params: RegimeParams, k: Optional[int] = None) -> float:
    """
    log G for an arbitrary width vector with lambda_prior = sum 1/N_l.

    Uses the exact sum of 1/N_l from ``widths``; params.lambda_prior is only
    checked for presence.
    """
    _require(params, Regime.FIXED_LAMBDA_PRIOR)
    k = _shift(params, k)
    lam = _prior_depth(widths)
    log_nu = math.log(params.nu)
    half_p = P / 2.0

    value = sum(0.5 * w * (math.log(0.5 * w) - 1.0) for w in widths)
    value += half_p * (math.log(half_p) - 1.0)
    value += len(widths) * HALF_LOG_2PI
    value += (k - 0.5) * sum(math.log(0.5 * w) for w in widths)
    value -= 0.5 * math.log(half_p)
    value += (k - 0.5) * log_nu
    value -= lam / 12.0
    value -= log_nu ** 2 / (4.0 * lam)
    value -= 0.5 * math.log(2.0 * lam)
    return value


def delta_log_g_case_b(widths: Sequence[int], params: RegimeParams, k: Optional[int] = None) -> float:
    """k [sum log(N_l/2) + log nu]; equals k[lambda_prior N log(N/2) + log nu] for equal widths."""
    _require(params, Regime.FIXED_LAMBDA_PRIOR)
    k = _shift(params, k)
    if k == 0:
        return 0.0
    _prior_depth(widths)
    return k * (sum(math.log(0.5 * w) for w in widths) + math.log(params.nu))


def scaling_constant(lambda_prior: float, alpha: float, nu: float) -> float:
    """
    Coefficient C of the 1/N term in Delta(log G)[1] - L log(N/2) - log nu.

    N (c_N - 1) tends to C, so the exact variance factor approaches its
    limit as 1 + C/N.
    """
    if lambda_prior <= 0 or alpha <= 0 or nu <= 0:
        raise InvalidRegimeError("scaling_constant needs positive lambda_prior, alpha and nu")
    return (1.0 - math.log(nu) / lambda_prior) / alpha


def delta_log_g_case_b_corrected(
    widths: Sequence[int],
    P: int,
    params: RegimeParams,
    k: Optional[int] = None,
) -> float:
    """delta_log_g_case_b plus its first 1/N correction k (k - log nu / lambda_prior) / P."""
    k = _shift(params, k)
    base = delta_log_g_case_b(widths, params, k)
    lam = _prior_depth(widths)
    return base + k * (k - math.log(params.nu) / lam) / P

# ==============================================================================
# CASE C: FIXED POSTERIOR DEPTH
# ==============================================================================

def t_star_for(params: RegimeParams) -> float:
    _require(params, Regime.FIXED_LAMBDA_POST)
    return solve_t_star(params.nu, params.lambda_post).root


def log_g_case_c(N: int, P: int, L: int, params: RegimeParams, k: Optional[int] = None) -> float:
    """
    log G for L layers of width N and P data points with L P / N = lambda_post.

    params.lambda_post is used for the saddle; N, P and L set the size terms.
    """
    _require(params, Regime.FIXED_LAMBDA_POST)
    k = _shift(params, k)
    lam = params.lambda_post
    t = t_star_for(params)
    half_p = P / 2.0
    half_n = N / 2.0

    value = half_p * (math.log(half_p) - 1.0 + math.log1p(t) - t * (1.0 + 0.5 * lam * t))
    value += L * HALF_LOG_2PI
    value += L * half_n * (math.log(half_n) - 1.0)
    value += (k - 0.5) * L * math.log(half_n)
    value -= 0.5 * math.log1p(t)
    value += (k - 0.5) * lam * t
    value -= 0.5 * math.log(lam + 1.0 / (1.0 + t))
    return value


def delta_log_g_case_c(N: int, L: int, params: RegimeParams, k: Optional[int] = None) -> float:
    """k [L log(N/2) + lambda_post t*]."""
    _require(params, Regime.FIXED_LAMBDA_POST)
    k = _shift(params, k)
    if k == 0:
        return 0.0
    return k * (L * math.log(N / 2.0) + params.lambda_post * t_star_for(params))

# ==============================================================================
# VARIANCE FACTORS
# ==============================================================================

def variance_factor_limit(params: RegimeParams) -> float:
    """
    Large-N limit of c = Var N0 / (nu ||x_perp||^2).

    (1 + z*/alpha)^{-1} for finite_L, 1 for fixed_lambda_prior and
    (1 + t*)^{-1} for fixed_lambda_post.
    """
    if params.regime is Regime.FINITE_L:
        return 1.0 / (1.0 + z_star_for(params) / params.alpha)
    if params.regime is Regime.FIXED_LAMBDA_PRIOR:
        _require(params, Regime.FIXED_LAMBDA_PRIOR)
        return 1.0
    return 1.0 / (1.0 + t_star_for(params))
