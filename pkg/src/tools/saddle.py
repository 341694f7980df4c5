# src/tools/saddle.py
"""
Root finders for the monotone saddle-point equations.

Every equation is written in logarithmic form g(x) = sum of log1p terms - rhs,
strictly increasing on (domain_lower, inf) with g -> -inf at the lower end.
A bracket is grown from a pivot, bisected to a fixed width and polished by
Newton steps that fall back to bisection when they leave the bracket.
"""
import math
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import structlog

from src.agent_library.errors import InvalidArgsError, NumericFailure
from src.config import get_settings
from src.models import DataSummary, NetworkSpec, SaddleKind, SaddleSolution, ZetaSolution
from src.tools.gamma_kernel import digamma_real, trigamma_real

logger = structlog.get_logger()

RESIDUAL_TOL = 1e-12
_EPS = np.finfo(np.float64).eps
_MAX_BRACKET_STEPS = 1100


def _grow_bracket(
    g: Callable[[float], float],
    domain_lower: float,
    pivot: float,
) -> Tuple[float, float, int]:
    """Bracket (lo, hi) with g(lo) < 0 < g(hi)."""
    steps = 0
    if g(pivot) < 0:
        lo, step = pivot, max(1.0, abs(pivot))
        hi = pivot + step
        while g(hi) <= 0:
            step *= 2.0
            hi = pivot + step
            steps += 1
            if steps > _MAX_BRACKET_STEPS or not math.isfinite(hi):
                raise NumericFailure("Could not find an upper bracket for a monotone saddle equation")
        return lo, hi, steps

    hi, gap = pivot, 0.5 * (pivot - domain_lower)
    lo = domain_lower + gap
    while g(lo) >= 0:
        gap *= 0.5
        lo = domain_lower + gap
        steps += 1
        if steps > _MAX_BRACKET_STEPS or lo <= domain_lower:
            raise NumericFailure("Lower bracket collapsed onto the domain boundary")
    return lo, hi, steps


def solve_increasing(
    g: Callable[[float], float],
    dg: Callable[[float], float],
    domain_lower: float,
    kind: SaddleKind,
    pivot: float = 0.0,
    scale: float = 1.0,
) -> SaddleSolution:
    """
    Unique root of a strictly increasing g on (domain_lower, inf).

    Args:
        g: The equation in residual form
        dg: Its derivative, used for the Newton polish
        domain_lower: Open lower end of the domain
        kind: Tag stored on the solution
        pivot: Starting point of the bracket search; must lie in the domain
        scale: Residual tolerance is RESIDUAL_TOL * max(1, scale)

    Raises:
        NumericFailure: If no bracket can be formed
    """
    settings = get_settings()
    g_pivot = g(pivot)
    if g_pivot == 0.0:
        return SaddleSolution(
            root=pivot, residual=0.0, iterations=0,
            bracket=(domain_lower, pivot + max(1.0, abs(pivot))), kind=kind,
        )
    lo, hi, iterations = _grow_bracket(g, domain_lower, pivot)
    bracket = (lo, hi)
    target = RESIDUAL_TOL * max(1.0, abs(scale))

    # bisection phase
    while hi - lo > settings.bisection_width and iterations < 400:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
        iterations += 1

    x = 0.5 * (lo + hi)
    for _ in range(settings.newton_max_iter):
        gx = g(x)
        iterations += 1
        if abs(gx) <= target:
            break
        if gx < 0:
            lo = x
        else:
            hi = x
        slope = dg(x)
        x_new = x - gx / slope if slope > 0 else 0.5 * (lo + hi)
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 4.0 * _EPS * max(1.0, abs(x)):
            x = x_new
            break
        x = x_new

    residual = g(x)
    if abs(residual) > target:
        logger.debug("Saddle residual above target", kind=kind.value, residual=residual, target=target)
    return SaddleSolution(root=x, residual=residual, iterations=iterations, bracket=bracket, kind=kind)


def _on_boundary(rhs: float, reference: float) -> bool:
    return abs(rhs) <= 4.0 * _EPS * max(1.0, abs(reference))


def _exact_zero(rhs: float, domain_lower: float, kind: SaddleKind) -> SaddleSolution:
    return SaddleSolution(root=0.0, residual=-rhs, iterations=0, bracket=(domain_lower, 1.0), kind=kind)

# ==============================================================================
# FINITE DEPTH
# ==============================================================================

def solve_z_star(nu: float, sigma2: float, alpha: float, L: int) -> SaddleSolution:
    """
    Root z* > max(-1, -alpha) of nu / sigma^{2(L+1)} = (1 + z/alpha)(1 + z)^L.
    """
    if nu <= 0 or sigma2 <= 0 or alpha <= 0 or L < 0:
        raise InvalidArgsError(f"solve_z_star needs nu, sigma2, alpha > 0 and L >= 0 (got {nu}, {sigma2}, {alpha}, {L})")

    rhs = math.log(nu) - (L + 1) * math.log(sigma2)
    domain_lower = max(-1.0, -alpha) if L > 0 else -alpha
    if _on_boundary(rhs, math.log(nu)):
        return _exact_zero(rhs, domain_lower, SaddleKind.Z_STAR)

    def g(z: float) -> float:
        return math.log1p(z / alpha) + L * math.log1p(z) - rhs

    def dg(z: float) -> float:
        return 1.0 / (alpha + z) + L / (1.0 + z)

    return solve_increasing(g, dg, domain_lower, SaddleKind.Z_STAR, scale=rhs)

# ==============================================================================
# FIXED POSTERIOR DEPTH
# ==============================================================================

def solve_t_star(nu: float, lambda_post: float) -> SaddleSolution:
    """Root t* > -1 of nu = (1 + t) exp(lambda_post * t)."""
    if nu <= 0 or lambda_post < 0:
        raise InvalidArgsError(f"solve_t_star needs nu > 0 and lambda_post >= 0 (got {nu}, {lambda_post})")

    rhs = math.log(nu)
    if _on_boundary(rhs, 1.0):
        return _exact_zero(rhs, -1.0, SaddleKind.T_STAR)

    def g(t: float) -> float:
        return math.log1p(t) + lambda_post * t - rhs

    def dg(t: float) -> float:
        return 1.0 / (1.0 + t) + lambda_post

    return solve_increasing(g, dg, -1.0, SaddleKind.T_STAR, scale=rhs)

# ==============================================================================
# GENERAL WIDTHS
# ==============================================================================

def zeta_star2(zeta_star: float, p: float, widths: Sequence[int], n: int, k: int) -> float:
    """First-order correction zeta** to the saddle at width shift k."""
    a = 1.0 / (2.0 * zeta_star + p / n)
    b = sum(1.0 / (2.0 * zeta_star + w / n) for w in widths)
    return -0.5 * (a + (1.0 + 2.0 * k) * b) / (a + b)


def solve_zeta(spec: NetworkSpec, data: DataSummary, k: int = 0) -> ZetaSolution:
    """
    zeta* and zeta** for an arbitrary width vector, measured in units of the
    narrowest hidden width N.

    zeta* solves ||theta*||^2 / (sigma^{2(L+1)} alpha0) = (1 + 2N zeta/P) prod (1 + 2N zeta/N_l).
    """
    if k < 0:
        raise InvalidArgsError(f"k must be >= 0, got {k}")
    if spec.n0 != data.n0:
        raise InvalidArgsError(f"NetworkSpec.n0={spec.n0} disagrees with DataSummary.n0={data.n0}")
    if data.theta_star_norm2 <= 0:
        raise InvalidArgsError("solve_zeta needs ||theta*||^2 > 0")

    n = spec.min_width
    p = float(data.p)
    widths = spec.widths
    rhs = math.log(data.nu) - (spec.depth + 1) * math.log(spec.sigma2)
    domain_lower = -min((p,) + widths) / (2.0 * n)

    if _on_boundary(rhs, math.log(data.nu)):
        solution = _exact_zero(rhs, domain_lower, SaddleKind.ZETA_STAR)
    else:
        def g(zeta: float) -> float:
            return math.log1p(2.0 * n * zeta / p) + sum(math.log1p(2.0 * n * zeta / w) for w in widths) - rhs

        def dg(zeta: float) -> float:
            return 2.0 * n / (p + 2.0 * n * zeta) + sum(2.0 * n / (w + 2.0 * n * zeta) for w in widths)

        solution = solve_increasing(g, dg, domain_lower, SaddleKind.ZETA_STAR, scale=rhs)

    return ZetaSolution(
        zeta_star=solution.root,
        zeta_star2=zeta_star2(solution.root, p, widths, n, k),
        scale_n=n,
        solution=solution,
    )

# ==============================================================================
# CONTOUR SHIFT
# ==============================================================================

def solve_contour_shift(
    shapes: Sequence[float],
    log_scales_sum: float,
    multiplicities: Optional[Sequence[int]] = None,
) -> SaddleSolution:
    """
    Real saddle c of u -> u * sum(log theta_j) + sum m_j log Gamma(k_j + u).

    c solves sum(log theta_j) + sum m_j digamma(k_j + c) = 0 on c > -min k_j.
    """
    shapes_arr = np.asarray(shapes, dtype=np.float64)
    counts = np.ones_like(shapes_arr) if multiplicities is None else np.asarray(multiplicities, dtype=np.float64)
    if np.any(shapes_arr <= 0):
        raise InvalidArgsError("Gamma shapes must be positive")

    def g(c: float) -> float:
        return float(log_scales_sum + np.dot(counts, digamma_real(shapes_arr + c)))

    def dg(c: float) -> float:
        return float(np.dot(counts, trigamma_real(shapes_arr + c)))

    return solve_increasing(g, dg, -float(shapes_arr.min()), SaddleKind.CONTOUR_SHIFT, scale=log_scales_sum)
