# src/tools/meijer_g.py
"""
Exact evaluation of G^{L+1,0}_{0,L+1}(||theta*||^2 / 4M; -; P/2 + k_data, N_l/2 + k_widths).

The G-function is, up to Gamma prefactors, the density at 0 of a sum of
independent log-Gamma variables log phi_j with phi_j ~ Gamma(shape_j, theta_j).
That density is the inverse Fourier transform of the product of their
characteristic functions, integrated along the horizontal line through the
real saddle c of the cumulant generating function:

    Den(0) = exp(K(c)) / (2 pi) * integral exp(K(c - i t) - K(c)) dt,
    K(u) = sum_j [u log theta_j + log Gamma(shape_j + u) - log Gamma(shape_j)].
"""
import math
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np
import structlog
from scipy.special import kve

from src.agent_library.errors import InvalidArgsError, QuadratureNonConvergence
from src.config import get_settings
from src.models import GArgs, NetworkSpec, QuadratureReport, ShiftTarget
from src.tools.gamma_kernel import log_gamma, log_gamma_real, trigamma_real
from src.tools.quadrature import adaptive_gauss_kronrod
from src.tools.saddle import solve_contour_shift

logger = structlog.get_logger()

LOG_2PI = math.log(2.0 * math.pi)
_MAX_DOUBLINGS = 60


class GammaFactors(NamedTuple):
    """Shapes and log-scales of the Gamma variables behind a G-function."""
    shapes: np.ndarray
    log_scales: np.ndarray


class _GroupedCumulant:
    """K(u) with equal shapes merged into multiplicities."""

    def __init__(self, shapes: np.ndarray, log_scales: np.ndarray):
        self.shapes, self.counts = np.unique(shapes, return_counts=True)
        self.counts = self.counts.astype(np.float64)
        self.log_scale_sum = float(np.sum(log_scales))
        self.log_gamma_at_shapes = log_gamma_real(self.shapes)

    def __call__(self, u: Union[complex, np.ndarray]) -> np.ndarray:
        u = np.atleast_1d(np.asarray(u, dtype=np.complex128))
        total = u * self.log_scale_sum
        for shape, count, lg in zip(self.shapes, self.counts, self.log_gamma_at_shapes):
            total = total + count * (log_gamma(shape + u) - lg)
        return total

    def curvature(self, c: float) -> float:
        return float(np.dot(self.counts, trigamma_real(self.shapes + c)))

# ==============================================================================
# PARAMETERS
# ==============================================================================

def scale_m(spec: NetworkSpec) -> float:
    """log(4M) = sum over l = 0..L of [log(2 sigma^2) - log N_l]."""
    log_two_sigma2 = math.log(2.0 * spec.sigma2)
    return float(sum(log_two_sigma2 - math.log(n) for n in spec.all_widths))


def gamma_factors(args: GArgs) -> GammaFactors:
    """
    shape_0 = P/2 + k_data + 1 with theta_0 = 2 sigma^2 / (N0 ||theta*||^2);
    shape_l = N_l/2 + k_widths + 1 with theta_l = 2 sigma^2 / N_l.
    """
    spec = args.spec
    log_two_sigma2 = math.log(2.0 * spec.sigma2)
    shapes = [args.p / 2.0 + args.k_data + 1.0] + [w / 2.0 + args.k_widths + 1.0 for w in spec.widths]
    log_scales = [log_two_sigma2 - math.log(spec.n0) - math.log(args.theta_star_norm2)]
    log_scales += [log_two_sigma2 - math.log(w) for w in spec.widths]
    return GammaFactors(np.asarray(shapes, dtype=np.float64), np.asarray(log_scales, dtype=np.float64))


def log_argument(args: GArgs) -> float:
    """log z with z = ||theta*||^2 / 4M."""
    return math.log(args.theta_star_norm2) - scale_m(args.spec)


def phi_integrand(t: Union[float, np.ndarray], args: GArgs):
    """
    Log characteristic function of sum_j log phi_j evaluated at -t.

    Phi(t) = sum_j [-i t log theta_j + log Gamma(shape_j - i t) - log Gamma(shape_j)],
    so Phi(0) = 0 and Phi(-t) = conj(Phi(t)).
    """
    factors = gamma_factors(args)
    cumulant = _GroupedCumulant(factors.shapes, factors.log_scales)
    t_arr = np.asarray(t, dtype=np.float64)
    values = cumulant(-1j * t_arr.ravel())
    return values[0] if t_arr.ndim == 0 else values.reshape(t_arr.shape)

# ==============================================================================
# CONTOUR QUADRATURE
# ==============================================================================

def _check_tol(tol: float) -> None:
    if not 1e-12 <= tol <= 1e-6:
        raise InvalidArgsError(f"Quadrature tolerance must lie in [1e-12, 1e-6], got {tol}")


def _contour_density(
    shapes: np.ndarray,
    log_scales: np.ndarray,
    tol: float,
    shift_c: Optional[float] = None,
) -> QuadratureReport:
    """log Den_{sum log phi}(0); log_value is filled in by the caller."""
    settings = get_settings()
    cumulant = _GroupedCumulant(shapes, log_scales)

    if shift_c is None:
        shift_c = solve_contour_shift(cumulant.shapes, cumulant.log_scale_sum, cumulant.counts).root
    elif shift_c <= -float(cumulant.shapes.min()):
        raise InvalidArgsError(f"Contour shift {shift_c} leaves the pole-free strip")

    k_peak = float(cumulant(shift_c)[0].real)
    drop = settings.truncation_decades * math.log(10.0)

    # Re K(c - it) decreases in |t|, so the window grows until its edge is below the cut
    half_width = math.sqrt(2.0 * drop / cumulant.curvature(shift_c))
    for _ in range(_MAX_DOUBLINGS):
        if cumulant(shift_c - 1j * half_width)[0].real - k_peak <= -drop:
            break
        half_width *= 2.0
    else:
        raise QuadratureNonConvergence(f"Contour window did not reach a {settings.truncation_decades}-decade drop")

    def integrand(t: np.ndarray) -> np.ndarray:
        return np.exp(cumulant(shift_c - 1j * t) - k_peak)

    result = adaptive_gauss_kronrod(
        integrand, -half_width, half_width,
        tol=tol, max_panels=settings.max_panels, initial_panels=8,
    )
    real_part = result.value.real
    if real_part <= 0:
        raise QuadratureNonConvergence(f"Contour integral has non-positive real part {real_part:.3e}")

    log_density = k_peak + math.log(real_part) - LOG_2PI
    report = QuadratureReport(
        log_value=log_density,
        log_density=log_density,
        imag_residual=abs(result.value.imag) / real_part,
        panels=result.panels,
        truncation_T=half_width,
        shift_c=float(shift_c),
        error_estimate=result.error / real_part,
    )
    logger.debug(
        "Contour quadrature converged",
        panels=report.panels, T=report.truncation_T, c=report.shift_c, imag_residual=report.imag_residual,
    )
    return report


def log_density_log_gamma_sum(
    shapes: Sequence[float],
    log_scales: Sequence[float],
    x: float = 0.0,
    tol: Optional[float] = None,
) -> QuadratureReport:
    """
    Density of sum_j log phi_j at x, phi_j ~ Gamma(shapes[j], exp(log_scales[j])).
    """
    tol = get_settings().quad_tol if tol is None else tol
    _check_tol(tol)
    shapes_arr = np.asarray(shapes, dtype=np.float64)
    scales_arr = np.array(log_scales, dtype=np.float64)
    if shapes_arr.shape != scales_arr.shape or shapes_arr.size == 0:
        raise InvalidArgsError("shapes and log_scales must be non-empty and of equal length")
    if np.any(shapes_arr <= 0):
        raise InvalidArgsError("Gamma shapes must be positive")
    scales_arr[0] -= x
    return _contour_density(shapes_arr, scales_arr, tol)


def _to_log_g(report: QuadratureReport, shapes: np.ndarray, log_scales: np.ndarray) -> QuadratureReport:
    log_value = report.log_density + float(np.sum(log_gamma_real(shapes))) + float(np.sum(log_scales))
    return report.model_copy(update={"log_value": log_value})


def log_meijer_g(args: GArgs, tol: Optional[float] = None, shift_c: Optional[float] = None) -> QuadratureReport:
    """
    log G^{L+1,0}_{0,L+1}(||theta*||^2/4M; -; P/2 + k_data, N_l/2 + k_widths).

    Args:
        args: G-function instance
        tol: Relative tolerance on exp(log G), in [1e-12, 1e-6]
        shift_c: Vertical contour offset; defaults to the real saddle

    Raises:
        QuadratureNonConvergence: If the panel budget is exhausted
        InvalidArgsError: If tol or shift_c is out of range
    """
    tol = get_settings().quad_tol if tol is None else tol
    _check_tol(tol)
    factors = gamma_factors(args)
    report = _contour_density(factors.shapes, factors.log_scales, tol, shift_c)
    return _to_log_g(report, factors.shapes, factors.log_scales)


def log_meijer_g_general(log_z: float, b: Sequence[float], tol: Optional[float] = None) -> QuadratureReport:
    """
    log G^{m,0}_{0,m}(z; -; b_1..b_m) for b_j > -1.

    Scales are spread so each Gamma factor is centred near its mode; only
    their sum, -log z, enters the result.
    """
    tol = get_settings().quad_tol if tol is None else tol
    _check_tol(tol)
    shapes = np.asarray(b, dtype=np.float64) + 1.0
    if shapes.size == 0 or np.any(shapes <= 0):
        raise InvalidArgsError(f"b-parameters must be > -1, got {list(b)}")
    log_shapes = np.log(shapes)
    log_scales = -log_shapes + (float(np.sum(log_shapes)) - log_z) / shapes.size
    report = _contour_density(shapes, log_scales, tol)
    return _to_log_g(report, shapes, log_scales)


def log_meijer_g_bessel(log_z: float, b0: float, b1: float) -> float:
    """G^{2,0}_{0,2}(z; b0, b1) = 2 z^{(b0+b1)/2} K_{b0-b1}(2 sqrt z), in logs."""
    x = 2.0 * math.exp(0.5 * log_z)
    return math.log(2.0) + 0.5 * (b0 + b1) * log_z + math.log(kve(b0 - b1, x)) - x


def delta_log_g(
    args: GArgs,
    k: int,
    target: ShiftTarget = ShiftTarget.WIDTHS,
    tol: Optional[float] = None,
) -> float:
    """
    log G at shift k on ``target`` minus log G at no shift.

    Both evaluations share tol so common quadrature error cancels.
    """
    if k < 0:
        raise InvalidArgsError(f"k must be >= 0, got {k}")
    if k == 0:
        return 0.0
    if target is ShiftTarget.WIDTHS and args.spec.depth == 0:
        return 0.0
    base = log_meijer_g(args.shifted(0), tol=tol)
    shifted = log_meijer_g(args.shifted(k, target), tol=tol)
    return shifted.log_value - base.log_value
