# src/tools/model_select.py
"""
Evidence-maximizing hyperparameters and evidence gaps between regimes.
"""
import math
from typing import Optional, Tuple

import structlog
from scipy.optimize import brentq, minimize_scalar

from src.agent_library.errors import InvalidArgsError, NumericFailure
from src.models import DataSummary, NetworkSpec, SelectionReport
from src.tools.posterior import log_evidence_exact
from src.tools.saddle import solve_t_star, solve_z_star

logger = structlog.get_logger()


def sigma_star(nu: float, L: int) -> float:
    """argmax over sigma^2 of the evidence: nu^{1/(L+1)}."""
    if nu <= 0 or L < 0:
        raise InvalidArgsError(f"sigma_star needs nu > 0 and L >= 0 (got {nu}, {L})")
    return nu ** (1.0 / (L + 1))


def l_star(nu: float, sigma2: float) -> float:
    """
    Real-valued evidence-maximizing depth log(nu)/log(sigma^2) - 1.

    Raises:
        InvalidArgsError: If sigma2 = 1, where the optimum runs off to infinite depth
    """
    if nu <= 0 or sigma2 <= 0:
        raise InvalidArgsError(f"l_star needs nu > 0 and sigma2 > 0 (got {nu}, {sigma2})")
    if sigma2 == 1.0:
        raise InvalidArgsError("l_star is undefined at sigma2 = 1; use lambda_prior_star")
    return math.log(nu) / math.log(sigma2) - 1.0


def lambda_prior_star(nu: float) -> float:
    """sqrt(1 + log(nu)^2) - 1."""
    if nu <= 0:
        raise InvalidArgsError(f"nu must be > 0, got {nu}")
    return math.sqrt(1.0 + math.log(nu) ** 2) - 1.0

# ==============================================================================
# DEPTH-AWARE EVIDENCE (FIXED PRIOR DEPTH)
# ==============================================================================

def d_log_evidence_d_lambda_prior(nu: float, lambda_prior: float) -> float:
    """-1/(2 lambda) - 1/4 + log(nu)^2 / (4 lambda^2)."""
    if lambda_prior <= 0:
        raise InvalidArgsError(f"lambda_prior must be > 0, got {lambda_prior}")
    log_nu = math.log(nu)
    return -0.5 / lambda_prior - 0.25 + log_nu ** 2 / (4.0 * lambda_prior ** 2)


def lambda_prior_curvature(nu: float) -> float:
    """Second derivative of the evidence in lambda_prior at its maximizer, -(1 + lambda*)/(2 lambda*^2)."""
    lam = lambda_prior_star(nu)
    if lam == 0.0:
        raise InvalidArgsError("The curvature is unbounded at nu = 1")
    return -(1.0 + lam) / (2.0 * lam ** 2)


def lambda_prior_star_numeric(nu: float, upper: float = 1e6) -> float:
    """Root of d_log_evidence_d_lambda_prior found by Brent's method."""
    if math.log(nu) == 0.0:
        return 0.0
    lower = 1e-12
    if d_log_evidence_d_lambda_prior(nu, lower) <= 0 or d_log_evidence_d_lambda_prior(nu, upper) >= 0:
        raise NumericFailure(f"No sign change of the lambda_prior derivative on [{lower}, {upper}]")
    return brentq(lambda lam: d_log_evidence_d_lambda_prior(nu, lam), lower, upper, xtol=1e-15, rtol=1e-14)


def evidence_gap_lambda_prior(lambda_prior: float, nu: float) -> float:
    """
    log Z(lambda_prior) - log Z(lambda_prior*) in the fixed prior-depth regime.

    The expression contains no width; it is O(1) in N.
    """
    lam_star = lambda_prior_star(nu)
    if lambda_prior <= 0 or lam_star == 0.0:
        raise InvalidArgsError("evidence_gap_lambda_prior needs lambda_prior > 0 and nu != 1")
    log_nu = math.log(nu)

    def block(lam: float) -> float:
        return -0.5 * math.log(lam) - (lam + log_nu) ** 2 / (4.0 * lam)

    return block(lambda_prior) - block(lam_star)

# ==============================================================================
# FINITE DEPTH VS INFINITE DEPTH
# ==============================================================================

def evidence_gap_finite_depth(L: int, alpha: float, nu: float, sigma2: float = 1.0) -> float:
    """
    Per-unit-N log-evidence gap of a depth-L network relative to depth lambda_prior N:

        c = (alpha/2)[log(1 + z*/alpha) - z*/alpha] + (L/2)[log(1 + z*) - z*] <= 0,

    so Z_L / Z_inf ~ exp(c N).
    """
    z = solve_z_star(nu, sigma2, alpha, L).root
    gap = 0.5 * alpha * (math.log1p(z / alpha) - z / alpha)
    if L:
        gap += 0.5 * L * (math.log1p(z) - z)
    return min(gap, 0.0)


def d_log_evidence_d_lambda_post(P: int, nu: float, lambda_post: float) -> float:
    """P t*^2 / 4; never negative."""
    t = solve_t_star(nu, lambda_post).root
    return 0.25 * P * t * t

# ==============================================================================
# NUMERIC ARGMAX
# ==============================================================================

def maximize_evidence_sigma2(
    spec: NetworkSpec,
    data: DataSummary,
    bounds: Tuple[float, float],
    tol: Optional[float] = None,
    xatol: float = 1e-4,
) -> float:
    """
    sigma^2 maximizing the exact log evidence on ``bounds``.

    The evidence is unimodal in log sigma^2, so a bounded scalar search
    suffices.
    """
    lo, hi = bounds
    if not 0 < lo < hi:
        raise InvalidArgsError(f"Need 0 < lower < upper, got {bounds}")

    def objective(log_sigma2: float) -> float:
        return -log_evidence_exact(spec.with_sigma2(math.exp(log_sigma2)), data, tol=tol)

    result = minimize_scalar(objective, bounds=(math.log(lo), math.log(hi)), method="bounded", options={"xatol": xatol})
    if not result.success:
        raise NumericFailure(f"sigma^2 search failed: {result.message}")
    best = math.exp(result.x)
    logger.info("Evidence-maximizing sigma^2", sigma2=best, evaluations=int(result.nfev))
    return best

# ==============================================================================
# REPORT
# ==============================================================================

def selection_report(
    nu: float,
    L: int,
    sigma2: float,
    alpha: float,
    lambda_post: float,
    P: int,
) -> SelectionReport:
    """Optima and gaps for one configuration; l_star is None at sigma2 = 1."""
    return SelectionReport(
        sigma_star2=sigma_star(nu, L),
        l_star=None if sigma2 == 1.0 else l_star(nu, sigma2),
        lambda_prior_star=lambda_prior_star(nu),
        evidence_gap=evidence_gap_finite_depth(L, alpha, nu, sigma2),
        d_logZ_d_lambda_post=d_log_evidence_d_lambda_post(P, nu, lambda_post),
    )
