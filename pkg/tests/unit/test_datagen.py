# tests/unit/test_datagen.py
"""
Unit tests for data generation, interpolant geometry and dataset files.
"""
import numpy as np
import pytest

from src.agent_library.errors import DimensionMismatchError, InvalidArgsError, RankDeficientDesignError
from src.models import Dataset
from src.tools.datagen import (
    decompose,
    derive_seed,
    generate,
    load_dataset,
    min_norm_interpolant,
    save_dataset,
    sigma_perp,
    spawn_streams,
    summarize,
)

pytestmark = pytest.mark.unit


class TestGeneration:
    """Test suite for seeded data generation."""

    def test_same_seed_same_data(self):
        first, second = generate(15, 6, 0.2, seed=11), generate(15, 6, 0.2, seed=11)
        np.testing.assert_array_equal(first.x, second.x)
        np.testing.assert_array_equal(first.y, second.y)

    def test_different_seed_different_data(self):
        assert not np.array_equal(generate(15, 6, 0.2, seed=11).x, generate(15, 6, 0.2, seed=12).x)

    def test_target_direction_is_unit(self, small_dataset):
        assert abs(np.linalg.norm(small_dataset.v0) - 1.0) < 1e-14
        assert small_dataset.x.shape == (20, 8)

    def test_noiseless_targets(self):
        data = generate(10, 4, 0.0, seed=5)
        np.testing.assert_allclose(data.y, data.v0 @ data.x, rtol=1e-14)

    def test_full_64_bit_seed(self):
        data = generate(5, 2, 0.0, seed=2**64 - 1)
        assert data.seed == 2**64 - 1

    @pytest.mark.parametrize("n0,p,sigma_eps", [(0, 3, 0.1), (3, 0, 0.1), (3, 2, -1.0)])
    def test_invalid_arguments(self, n0, p, sigma_eps):
        with pytest.raises(InvalidArgsError):
            generate(n0, p, sigma_eps, seed=0)

    def test_derived_seeds_are_stable_and_distinct(self):
        seeds = [derive_seed(42, i) for i in range(5)]
        assert seeds == [derive_seed(42, i) for i in range(5)]
        assert len(set(seeds)) == 5
        assert all(0 <= s < 2**64 for s in seeds)

    def test_spawned_streams_are_independent(self):
        a, b = spawn_streams(3, 2)
        assert not np.array_equal(a.standard_normal(4), b.standard_normal(4))


class TestGeometry:
    """Test suite for the minimum-norm interpolant and projections."""

    def test_interpolates(self, small_dataset, small_geometry):
        np.testing.assert_allclose(small_geometry.theta_star @ small_dataset.x, small_dataset.y, atol=1e-10)
        assert small_geometry.rank == 8
        assert abs(small_geometry.theta_star_norm2 - small_geometry.theta_star @ small_geometry.theta_star) < 1e-14

    def test_interpolant_lies_in_column_space(self, small_geometry):
        basis = small_geometry.basis
        projected = basis @ (basis.T @ small_geometry.theta_star)
        np.testing.assert_allclose(projected, small_geometry.theta_star, atol=1e-12)

    def test_matches_pseudo_inverse(self, small_dataset, small_geometry):
        expected = np.linalg.pinv(small_dataset.x.T) @ small_dataset.y
        np.testing.assert_allclose(small_geometry.theta_star, expected, atol=1e-10)

    def test_overdetermined_design(self):
        data = generate(5, 12, 0.3, seed=2)
        geometry = min_norm_interpolant(data)
        expected = np.linalg.lstsq(data.x.T, data.y, rcond=None)[0]
        np.testing.assert_allclose(geometry.theta_star, expected, atol=1e-10)
        assert geometry.rank == 5
        with pytest.raises(InvalidArgsError):
            summarize(data, geometry)

    def test_rank_deficient_design(self):
        x = np.ones((6, 3))
        data = Dataset(x=x, y=np.ones(3), seed=0, sigma_eps=0.0)
        with pytest.raises(RankDeficientDesignError):
            min_norm_interpolant(data)

    def test_summary(self, small_dataset, small_geometry):
        summary = summarize(small_dataset, small_geometry)
        assert summary.n0 == 20 and summary.p == 8
        assert abs(summary.nu - small_geometry.theta_star_norm2 / 0.4) < 1e-12

    def test_decompose(self, small_dataset, small_geometry):
        x = np.random.default_rng(0).standard_normal(20)
        x_par, x_perp = decompose(x, small_geometry)
        np.testing.assert_allclose(x_par + x_perp, x, atol=1e-14)
        np.testing.assert_allclose(x_perp @ small_dataset.x, np.zeros(8), atol=1e-10)

    def test_decompose_dimension(self, small_geometry):
        with pytest.raises(DimensionMismatchError):
            decompose(np.ones(7), small_geometry)

    def test_sigma_perp(self, small_geometry):
        points = np.random.default_rng(1).standard_normal((4, 20))
        sigma = sigma_perp(points, small_geometry)
        np.testing.assert_array_equal(sigma, sigma.T)
        assert np.all(np.linalg.eigvalsh(sigma) > -1e-12)
        _, perp = decompose(points[0], small_geometry)
        assert abs(sigma[0, 0] - perp @ perp / 12) < 1e-12

    def test_sigma_perp_needs_perpendicular_space(self):
        data = generate(5, 5, 0.0, seed=4)
        with pytest.raises(InvalidArgsError):
            sigma_perp(np.ones((1, 5)), min_norm_interpolant(data))


class TestPersistence:
    """Test suite for the binary dataset format."""

    def test_save_and_load(self, tmp_path, small_dataset):
        path = save_dataset(tmp_path / "data" / "set.bin", small_dataset)
        loaded = load_dataset(path)
        np.testing.assert_array_equal(loaded.x, small_dataset.x)
        np.testing.assert_array_equal(loaded.y, small_dataset.y)
        np.testing.assert_array_equal(loaded.v0, small_dataset.v0)
        assert loaded.seed == small_dataset.seed
        assert loaded.sigma_eps == small_dataset.sigma_eps

    def test_file_size(self, tmp_path, small_dataset):
        path = save_dataset(tmp_path / "set.bin", small_dataset)
        assert path.stat().st_size == 32 + 8 * (20 * 8 + 8 + 20)

    def test_dataset_without_target_direction(self, tmp_path):
        data = Dataset(x=np.eye(3)[:, :2], y=np.array([1.0, 2.0]), seed=9, sigma_eps=0.5)
        assert load_dataset(save_dataset(tmp_path / "set.bin", data)).v0 is None

    def test_truncated_file(self, tmp_path, small_dataset):
        path = save_dataset(tmp_path / "set.bin", small_dataset)
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(DimensionMismatchError):
            load_dataset(path)
