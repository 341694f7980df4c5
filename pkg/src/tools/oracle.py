# src/tools/oracle.py
"""
Monte Carlo ground truth for the exact evaluators.

Nothing here calls the contour quadrature except where a sampled quantity is
compared against a density (the prior-norm KS test). The estimators are:

    rb_density_product_gammas   density of sum_j log phi_j at 0, conditioned on phi_0
    prior_q_samples             squared norms of Gaussian matrix-product columns
    mc_log_evidence             prior expectation of the Gaussian likelihood of theta*
    mc_char_fn                  self-normalized importance sampling of the posterior scale
    mc_double_descent_error     generalization error of the optimal posterior
"""
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy import stats
from scipy.integrate import cumulative_trapezoid
from scipy.special import digamma, logsumexp, polygamma

from src.agent_library.errors import InvalidArgsError, SingularAlpha0Error
from src.models import (
    ComplexValue,
    DataSummary,
    DoubleDescentPoint,
    GArgs,
    McEstimate,
    NetworkSpec,
    VarianceScale,
)
from src.tools.datagen import generate_from_rng, make_rng, min_norm_interpolant
from src.tools.gamma_kernel import log_gamma_real
from src.tools.meijer_g import gamma_factors, log_meijer_g_general, scale_m

logger = structlog.get_logger()

MIN_RB_SAMPLES = 1_000
MIN_Q_SAMPLES = 10_000
MIN_TRIALS = 100
SINGULAR_WINDOW = 1e-3
_CHUNK = 1 << 18
_Q_GRID_POINTS = 801
_Q_GRID_SDS = 10.0


def _estimate(samples: np.ndarray, seed: int) -> McEstimate:
    n = samples.size
    std_error = float(np.std(samples, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return McEstimate(value=float(np.mean(samples)), std_error=std_error, n_samples=n, seed=seed)

# ==============================================================================
# PRODUCT-OF-GAMMAS DENSITY
# ==============================================================================

def rb_density_product_gammas(args: GArgs, n: int, seed: int) -> McEstimate:
    """
    Rao-Blackwellized estimate of Den_{sum log phi}(0).

    phi_1..phi_L are sampled; the closed-form density of log phi_0 is averaged
    at -sum_{l>=1} log phi_l. With no hidden layers nothing is sampled and the
    estimate is exact with zero standard error.

    Raises:
        InvalidArgsError: If n < MIN_RB_SAMPLES
    """
    if n < MIN_RB_SAMPLES:
        raise InvalidArgsError(f"Need n >= {MIN_RB_SAMPLES} samples, got {n}")
    factors = gamma_factors(args)
    log_phi0 = stats.loggamma(c=factors.shapes[0], loc=factors.log_scales[0])

    if factors.shapes.size == 1:
        value = float(np.exp(log_phi0.logpdf(0.0)))
        return McEstimate(value=value, std_error=0.0, n_samples=n, seed=seed)

    rng = make_rng(seed)
    hidden_shapes = factors.shapes[1:]
    hidden_scales = np.exp(factors.log_scales[1:])
    values = np.empty(n)
    for start in range(0, n, _CHUNK):
        size = min(_CHUNK, n - start)
        phis = rng.gamma(hidden_shapes, hidden_scales, size=(size, hidden_shapes.size))
        values[start:start + size] = np.exp(log_phi0.logpdf(-np.log(phis).sum(axis=1)))

    estimate = _estimate(values, seed)
    logger.debug("RB density estimate", value=estimate.value, std_error=estimate.std_error, n=n)
    return estimate

# ==============================================================================
# PRIOR NORM Q
# ==============================================================================

def _check_widths(widths: Sequence[int]) -> Tuple[int, ...]:
    widths = tuple(int(w) for w in widths)
    if not widths or any(w < 1 for w in widths):
        raise InvalidArgsError(f"widths must be a non-empty sequence of positive integers, got {widths}")
    return widths


def prior_q_samples(widths: Sequence[int], n: int, seed: int, normalized: bool = True) -> np.ndarray:
    """
    Samples of Q = ||W^(L) ... W^(1) u||^2 for a unit vector u and standard Gaussian W^(l) of shape N_l x N_(l-1).

    With ``normalized`` each layer is divided by sqrt(N_l), so E[Q] = 1. By
    rotational invariance W^(1) u ~ N(0, I_{N_1}) whatever the input dimension.
    """
    widths = _check_widths(widths)
    if n < MIN_Q_SAMPLES:
        raise InvalidArgsError(f"Need n >= {MIN_Q_SAMPLES} samples, got {n}")
    rng = make_rng(seed)
    largest = max(a * b for a, b in zip(widths[1:], widths[:-1])) if len(widths) > 1 else widths[0]
    chunk = max(1, min(_CHUNK, (1 << 22) // largest))

    out = np.empty(n)
    for start in range(0, n, chunk):
        size = min(chunk, n - start)
        v = rng.standard_normal((size, widths[0]))
        for prev, width in zip(widths[:-1], widths[1:]):
            w = rng.standard_normal((size, width, prev))
            v = np.einsum("bij,bj->bi", w, v)
        out[start:start + size] = np.einsum("bi,bi->b", v, v)

    if normalized:
        out /= float(np.prod(np.asarray(widths, dtype=np.float64)))
    return out


def _log_q_moments(widths: Tuple[int, ...], normalized: bool) -> Tuple[float, float]:
    half = np.asarray(widths, dtype=np.float64) / 2.0
    mean = float(np.sum(digamma(half) + math.log(2.0)))
    if normalized:
        mean -= float(np.sum(np.log(2.0 * half)))
    return mean, float(math.sqrt(np.sum(polygamma(1, half))))


def log_q_density(log_rho: np.ndarray, widths: Sequence[int], normalized: bool = True) -> np.ndarray:
    """
    Density of log Q at log_rho.

    Q / prod(s_l) is a product of unit-scale Gamma(N_l/2) variables with
    s_l = 2 (or 2/N_l when normalized), whose density is
    G^{L,0}_{0,L}(y; N_l/2 - 1) / prod Gamma(N_l/2).
    """
    widths = _check_widths(widths)
    half = np.asarray(widths, dtype=np.float64) / 2.0
    log_s = float(np.sum(np.log(1.0 / half))) if normalized else len(widths) * math.log(2.0)
    b = half - 1.0
    norm = float(np.sum(log_gamma_real(half)))

    out = np.empty(np.size(log_rho))
    for i, value in enumerate(np.ravel(log_rho)):
        log_y = float(value) - log_s
        out[i] = log_y + log_meijer_g_general(log_y, b).log_value - norm
    return out.reshape(np.shape(log_rho))


def q_cdf_grid(widths: Sequence[int], normalized: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    """CDF of log Q on a grid spanning the mean +- 10 standard deviations."""
    widths = _check_widths(widths)
    mean, sd = _log_q_moments(widths, normalized)
    grid = np.linspace(mean - _Q_GRID_SDS * sd, mean + _Q_GRID_SDS * sd, _Q_GRID_POINTS)
    density = np.exp(log_q_density(grid, widths, normalized))
    cdf = cumulative_trapezoid(density, grid, initial=0.0)
    total = cdf[-1]
    logger.debug("Q density grid", widths=widths, mass=total)
    return grid, cdf / total


def q_density_ks_test(samples: np.ndarray, widths: Sequence[int], normalized: bool = True) -> float:
    """Kolmogorov-Smirnov p-value of Q samples against the G-function density."""
    samples = np.asarray(samples, dtype=np.float64)
    if np.any(samples <= 0):
        raise InvalidArgsError("Q samples must be positive")
    grid, cdf = q_cdf_grid(widths, normalized)

    def log_cdf(x: np.ndarray) -> np.ndarray:
        return np.interp(x, grid, cdf, left=0.0, right=1.0)

    result = stats.kstest(np.log(samples), log_cdf)
    logger.info("Q density KS test", widths=tuple(widths), statistic=result.statistic, p_value=result.pvalue)
    return float(result.pvalue)

# ==============================================================================
# EVIDENCE AND CHARACTERISTIC FUNCTION
# ==============================================================================

def _prior_log_tau(spec: NetworkSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    log_two_m = scale_m(spec) - math.log(2.0)
    if not spec.widths:
        return np.full(n, log_two_m)
    shapes = np.asarray(spec.widths, dtype=np.float64) / 2.0
    return log_two_m + np.log(rng.gamma(shapes, 1.0, size=(n, shapes.size))).sum(axis=1)


def _log_likelihood_weights(log_tau: np.ndarray, data: DataSummary) -> np.ndarray:
    return -0.5 * data.p * log_tau - 0.5 * data.theta_star_norm2 * np.exp(-log_tau)


def mc_log_evidence(spec: NetworkSpec, data: DataSummary, n: int, seed: int) -> McEstimate:
    """
    log Z = (P/2) log 2 pi + log E_prior[tau^{-P/2} exp(-||theta*||^2 / 2 tau)].

    The standard error is the delta-method error of the log.
    """
    if n < MIN_RB_SAMPLES:
        raise InvalidArgsError(f"Need n >= {MIN_RB_SAMPLES} samples, got {n}")
    log_w = _log_likelihood_weights(_prior_log_tau(spec, n, make_rng(seed)), data)
    log_mean = float(logsumexp(log_w) - math.log(n))
    scaled = np.exp(log_w - log_w.max())
    relative_se = float(np.std(scaled, ddof=1) / (math.sqrt(n) * np.mean(scaled)))
    return McEstimate(
        value=0.5 * data.p * math.log(2.0 * math.pi) + log_mean,
        std_error=relative_se,
        n_samples=n,
        seed=seed,
    )


def mc_char_fn(
    spec: NetworkSpec,
    data: DataSummary,
    t_par_inner: float,
    t_perp_norm2: float,
    n: int,
    seed: int,
) -> Tuple[ComplexValue, McEstimate]:
    """
    exp(-i <theta*, t>) E_post[exp(-tau ||t_perp||^2 / 2)] by importance sampling from the prior.

    Returns the complex value and the estimate of the real posterior factor.
    """
    if n < MIN_RB_SAMPLES:
        raise InvalidArgsError(f"Need n >= {MIN_RB_SAMPLES} samples, got {n}")
    log_tau = _prior_log_tau(spec, n, make_rng(seed))
    log_w = _log_likelihood_weights(log_tau, data)
    w = np.exp(log_w - log_w.max())
    w /= w.sum()
    f = np.exp(-0.5 * t_perp_norm2 * np.exp(log_tau))

    mean = float(np.dot(w, f))
    std_error = float(math.sqrt(np.dot(w * w, (f - mean) ** 2)))
    ess = 1.0 / float(np.dot(w, w))
    logger.debug("Char-fn importance sampling", effective_sample_size=ess, n=n)

    phase = complex(math.cos(t_par_inner), -math.sin(t_par_inner))
    estimate = McEstimate(value=mean, std_error=std_error, n_samples=n, seed=seed)
    return ComplexValue.from_complex(phase * mean), estimate

# ==============================================================================
# DOUBLE DESCENT
# ==============================================================================

def _check_alpha0(alpha0: float) -> None:
    if alpha0 <= 0:
        raise InvalidArgsError(f"alpha0 must be > 0, got {alpha0}")
    if abs(alpha0 - 1.0) < SINGULAR_WINDOW:
        raise SingularAlpha0Error(f"alpha0={alpha0} lies within {SINGULAR_WINDOW} of the interpolation threshold")


def double_descent_bias(alpha0: float, sigma_eps2: float) -> float:
    """1 - alpha0 + alpha0 sigma^2 / (1 - alpha0) below the threshold, sigma^2 / (alpha0 - 1) above."""
    _check_alpha0(alpha0)
    if alpha0 < 1:
        return 1.0 - alpha0 + alpha0 * sigma_eps2 / (1.0 - alpha0)
    return sigma_eps2 / (alpha0 - 1.0)


def double_descent_variance(
    alpha0: float,
    sigma_eps2: float,
    scale: VarianceScale = VarianceScale.TARGET_NORM,
) -> float:
    _check_alpha0(alpha0)
    if alpha0 > 1:
        return 0.0
    if scale is VarianceScale.TARGET_NORM:
        return (1.0 / alpha0 - 1.0) * (1.0 + alpha0 * sigma_eps2 / (1.0 - alpha0))
    return 1.0 - alpha0 + sigma_eps2


def double_descent_closed_form(
    alpha0: float,
    sigma_eps2: float,
    scale: VarianceScale = VarianceScale.TARGET_NORM,
) -> float:
    """
    Large-N0 error of the optimal posterior.

    With the target-norm scale this is 1/alpha0 - alpha0 + sigma^2/(1 - alpha0)
    for alpha0 < 1 and sigma^2/(alpha0 - 1) above.
    """
    return double_descent_bias(alpha0, sigma_eps2) + double_descent_variance(alpha0, sigma_eps2, scale)


def double_descent_finite_size(
    n0: int,
    p: int,
    sigma_eps2: float,
    scale: VarianceScale = VarianceScale.TARGET_NORM,
) -> Tuple[float, float]:
    """
    Exact (bias, variance) at finite N0 and P from E tr (X^T X)^{-1} = P / (N0 - P - 1).

    Raises:
        InvalidArgsError: If |N0 - P| <= 1, where the inverse-Wishart mean does not exist
    """
    if abs(n0 - p) <= 1:
        raise InvalidArgsError(f"Finite-size moments need |N0 - P| > 1, got N0={n0}, P={p}")
    if p > n0:
        return sigma_eps2 * n0 / (p - n0 - 1), 0.0
    noise = sigma_eps2 * p / (n0 - p - 1)
    bias = 1.0 - p / n0 + noise
    signal = 1.0 if scale is VarianceScale.TARGET_NORM else p / n0
    variance = (n0 - p) / p * (signal + noise)
    return bias, variance


def _double_descent_trial(
    n0: int,
    p: int,
    sigma_eps2: float,
    n_test: int,
    scale: VarianceScale,
    sequence: np.random.SeedSequence,
) -> Tuple[float, float]:
    rng = make_rng(sequence)
    data = generate_from_rng(n0, p, math.sqrt(sigma_eps2), rng)
    geometry = min_norm_interpolant(data)
    x = rng.standard_normal((n_test, n0))

    bias = float(np.mean((x @ (geometry.theta_star - data.v0)) ** 2))
    if p >= n0:
        return bias, 0.0

    if scale is VarianceScale.TARGET_NORM:
        projected = geometry.basis @ (geometry.basis.T @ data.v0)
        norm2 = float(data.v0 @ data.v0) + float(np.sum((geometry.theta_star - projected) ** 2))
    else:
        norm2 = geometry.theta_star_norm2
    perp = x - (x @ geometry.basis) @ geometry.basis.T
    variance = float(np.mean(np.sum(perp * perp, axis=1))) * norm2 / p
    return bias, variance


def mc_double_descent_error(
    n0: int,
    alpha0_grid: Sequence[float],
    sigma_eps2: float,
    trials: int,
    seed: int,
    n_test: int = 16,
    scale: VarianceScale = VarianceScale.TARGET_NORM,
    executor=None,
) -> List[DoubleDescentPoint]:
    """
    E <f(x) - V0 x>^2 of the posterior N(theta*^T x, scale ||x_perp||^2 / P) over data, noise and test points.

    Every grid point and trial draws from its own spawned stream, so results
    do not depend on how trials are scheduled.

    Args:
        n0: Input dimension
        alpha0_grid: Values of P / N0; P = round(alpha0 N0)
        sigma_eps2: Label noise variance
        trials: Datasets per grid point
        seed: Root seed
        n_test: Fresh test inputs per dataset
        scale: Norm multiplying ||x_perp||^2 / P in the variance
        executor: Optional concurrent.futures executor for the trials

    Raises:
        SingularAlpha0Error: If a grid point lies within 1e-3 of 1
        InvalidArgsError: If trials < 100 or P rounds onto N0
    """
    if trials < MIN_TRIALS:
        raise InvalidArgsError(f"Need trials >= {MIN_TRIALS}, got {trials}")
    if sigma_eps2 < 0:
        raise InvalidArgsError(f"sigma_eps2 must be >= 0, got {sigma_eps2}")
    for alpha0 in alpha0_grid:
        _check_alpha0(alpha0)

    grid_sequences = np.random.SeedSequence(int(seed)).spawn(len(alpha0_grid))
    points = []
    for alpha0, grid_sequence in zip(alpha0_grid, grid_sequences):
        p = int(round(alpha0 * n0))
        if abs(p - n0) <= 1:
            raise SingularAlpha0Error(f"alpha0={alpha0} gives P={p} next to N0={n0}")
        children = grid_sequence.spawn(trials)
        jobs = [(n0, p, sigma_eps2, n_test, scale, child) for child in children]
        if executor is None:
            outcomes = [_double_descent_trial(*job) for job in jobs]
        else:
            outcomes = list(executor.map(_double_descent_trial, *zip(*jobs)))

        bias = np.array([o[0] for o in outcomes])
        variance = np.array([o[1] for o in outcomes])
        finite_bias, finite_variance = double_descent_finite_size(n0, p, sigma_eps2, scale)
        point = DoubleDescentPoint(
            alpha0=float(alpha0),
            p=p,
            error=_estimate(bias + variance, seed),
            bias=_estimate(bias, seed),
            variance=_estimate(variance, seed),
            closed_form=double_descent_closed_form(alpha0, sigma_eps2, scale),
            finite_size=finite_bias + finite_variance,
        )
        logger.info(
            "Double-descent grid point",
            alpha0=alpha0, p=p, error=point.error.value, se=point.error.std_error, closed_form=point.closed_form,
        )
        points.append(point)
    return points
