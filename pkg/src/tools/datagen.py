# src/tools/datagen.py
"""
Training data and its geometry.

Inputs are i.i.d. standard normal columns of X (N0 x P); targets follow
y_i = V0^T x_i + eps_i with V0 uniform on the unit sphere. Randomness comes
from numpy's counter-based Philox generator keyed by a 64-bit seed; parallel
streams are derived by SeedSequence spawning.
"""
import struct
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
import structlog
from scipy.linalg import qr, solve_triangular, svdvals

from src.agent_library.errors import DimensionMismatchError, InvalidArgsError, RankDeficientDesignError
from src.models import DataSummary, Dataset, Geometry

logger = structlog.get_logger()

RANK_TOL = 1e-10
_HEADER = struct.Struct("<QQQd")

# ==============================================================================
# RANDOM STREAMS
# ==============================================================================

def make_rng(seed: Union[int, np.random.SeedSequence]) -> np.random.Generator:
    """Philox-backed generator for a 64-bit seed or a spawned SeedSequence."""
    sequence = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.Philox(sequence))


def spawn_streams(seed: int, count: int) -> List[np.random.Generator]:
    """count independent generators derived from one seed."""
    return [make_rng(child) for child in np.random.SeedSequence(int(seed)).spawn(count)]


def derive_seed(seed: int, index: int) -> int:
    """64-bit seed of stream ``index`` spawned from ``seed``; stable across runs and worker counts."""
    child = np.random.SeedSequence(int(seed), spawn_key=(int(index),))
    return int(child.generate_state(1, dtype=np.uint64)[0])

# ==============================================================================
# GENERATION
# ==============================================================================

def generate(n0: int, p: int, sigma_eps: float, seed: int) -> Dataset:
    """
    Draw (X, y) from the Gaussian linear target model.

    Args:
        n0: Input dimension
        p: Number of samples; p > n0 is allowed for over-determined designs
        sigma_eps: Label noise standard deviation
        seed: 64-bit seed
    """
    return generate_from_rng(n0, p, sigma_eps, make_rng(seed), seed=int(seed))


def generate_from_rng(n0: int, p: int, sigma_eps: float, rng: np.random.Generator, seed: int = 0) -> Dataset:
    """Same draw from an existing generator; ``seed`` is only recorded."""
    if n0 < 1 or p < 1:
        raise InvalidArgsError(f"n0 and p must be >= 1, got n0={n0}, p={p}")
    if sigma_eps < 0:
        raise InvalidArgsError(f"sigma_eps must be >= 0, got {sigma_eps}")

    x = rng.standard_normal((n0, p))
    v0 = rng.standard_normal(n0)
    v0 /= np.linalg.norm(v0)
    y = v0 @ x
    if sigma_eps > 0:
        y = y + sigma_eps * rng.standard_normal(p)
    return Dataset(x=x, y=y, seed=seed, sigma_eps=float(sigma_eps), v0=v0)


def check_rank(x: np.ndarray) -> None:
    """Reject designs whose smallest singular value is below RANK_TOL times the largest."""
    singular = svdvals(x)
    if singular[-1] <= RANK_TOL * singular[0]:
        raise RankDeficientDesignError(
            f"Design is numerically rank deficient: s_min/s_max = {singular[-1] / singular[0]:.3e}"
        )

# ==============================================================================
# GEOMETRY
# ==============================================================================

def min_norm_interpolant(data: Dataset) -> Geometry:
    """
    Minimum-norm solution of theta^T X = y and an orthonormal basis of col(X).

    For P > N0 there is no interpolant in general; the least-squares solution
    theta = (X X^T)^{-1} X y is returned and col(X) is all of R^{N0}.

    Raises:
        RankDeficientDesignError: If X fails the rank test
    """
    x, y = data.x, data.y
    check_rank(x)

    if data.p <= data.n0:
        q, r, piv = qr(x, mode="economic", pivoting=True)
        w = solve_triangular(r, y[piv], trans="T")
        theta = q @ w
        basis = q
        rank = data.p
    else:
        q, r, piv = qr(x.T, mode="economic", pivoting=True)
        theta = np.empty(data.n0)
        theta[piv] = solve_triangular(r, q.T @ y)
        basis = np.eye(data.n0)
        rank = data.n0

    norm2 = float(theta @ theta)
    logger.debug("Minimum-norm interpolant", n0=data.n0, p=data.p, theta_star_norm2=norm2)
    return Geometry(theta_star=theta, theta_star_norm2=norm2, rank=rank, basis=basis)


def summarize(data: Dataset, geometry: Geometry) -> DataSummary:
    if data.p > data.n0:
        raise InvalidArgsError(f"P={data.p} exceeds N0={data.n0}; no data summary exists")
    return DataSummary(n0=data.n0, p=data.p, theta_star_norm2=geometry.theta_star_norm2)


def decompose(x: np.ndarray, geometry: Geometry) -> Tuple[np.ndarray, np.ndarray]:
    """Split x into its projection onto col(X) and the orthogonal remainder."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != geometry.basis.shape[0]:
        raise DimensionMismatchError(f"Test point has dimension {x.shape[-1]}, expected {geometry.basis.shape[0]}")
    x_par = (x @ geometry.basis) @ geometry.basis.T
    return x_par, x - x_par


def sigma_perp(test_points: np.ndarray, geometry: Geometry) -> np.ndarray:
    """
    <x_i_perp, x_j_perp> / (N0 - P) for test points given as rows.

    Raises:
        InvalidArgsError: If P >= N0
        DimensionMismatchError: If the rows are not N0-dimensional
    """
    n0 = geometry.basis.shape[0]
    if geometry.rank >= n0:
        raise InvalidArgsError(f"sigma_perp needs P < N0, got P={geometry.rank}, N0={n0}")
    points = np.atleast_2d(np.asarray(test_points, dtype=np.float64))
    _, perp = decompose(points, geometry)
    gram = perp @ perp.T
    return 0.5 * (gram + gram.T) / (n0 - geometry.rank)

# ==============================================================================
# PERSISTENCE
# ==============================================================================

def save_dataset(path: Union[str, Path], data: Dataset) -> Path:
    """
    Little-endian binary file: header <u8 n0, u8 p, u8 seed, f8 sigma_eps>,
    then X column-major, y, and V0, all as <f8.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    v0 = data.v0 if data.v0 is not None else np.full(data.n0, np.nan)
    with path.open("wb") as handle:
        handle.write(_HEADER.pack(data.n0, data.p, data.seed, data.sigma_eps))
        handle.write(np.asarray(data.x, dtype="<f8").tobytes(order="F"))
        handle.write(np.asarray(data.y, dtype="<f8").tobytes())
        handle.write(np.asarray(v0, dtype="<f8").tobytes())
    logger.info("Dataset saved", path=str(path), n0=data.n0, p=data.p, seed=data.seed)
    return path


def load_dataset(path: Union[str, Path]) -> Dataset:
    raw = Path(path).read_bytes()
    n0, p, seed, sigma_eps = _HEADER.unpack_from(raw, 0)
    offset = _HEADER.size
    expected = offset + 8 * (n0 * p + p + n0)
    if len(raw) != expected:
        raise DimensionMismatchError(f"Dataset file has {len(raw)} bytes, expected {expected}")
    body = np.frombuffer(raw, dtype="<f8", offset=offset)
    x = body[: n0 * p].reshape((n0, p), order="F").astype(np.float64)
    y = body[n0 * p: n0 * p + p].astype(np.float64)
    v0 = body[n0 * p + p:].astype(np.float64)
    return Dataset(x=x, y=y, seed=int(seed), sigma_eps=float(sigma_eps), v0=None if np.isnan(v0).all() else v0)
