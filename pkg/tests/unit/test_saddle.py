# tests/unit/test_saddle.py
"""
Unit tests for the monotone saddle-point solvers.
"""
import math

import pytest
from scipy import special

from src.agent_library.errors import InvalidArgsError
from src.models import DataSummaryFactory, NetworkSpecFactory, SaddleKind
from src.tools.saddle import _grow_bracket, solve_contour_shift, solve_t_star, solve_z_star, solve_zeta

pytestmark = pytest.mark.unit


class TestBracket:
    """Test suite for bracket growth around the pivot."""

    @pytest.fixture
    def recorded(self):
        points = []

        def g(x):
            points.append(x)
            return x - 0.1

        return g, points

    def test_lower_bracket_never_repeats_a_point(self, recorded):
        g, points = recorded
        lo, hi, steps = _grow_bracket(g, 0.0, 1.0)
        assert (lo, hi, steps) == (0.0625, 1.0, 3)
        assert points == [1.0, 0.5, 0.25, 0.125, 0.0625]

    def test_upper_bracket(self, recorded):
        g, points = recorded
        lo, hi, _ = _grow_bracket(g, -1.0, -0.5)
        assert lo == -0.5 and hi == 0.5
        assert len(points) == len(set(points))


class TestZStar:
    """Test suite for solve_z_star."""

    def test_one_layer_unit_alpha(self):
        """(1 + z)^2 = 2 at alpha = 1, L = 1."""
        solution = solve_z_star(2.0, 1.0, 1.0, 1)
        assert abs(solution.root - (math.sqrt(2.0) - 1.0)) < 1e-11
        assert solution.kind is SaddleKind.Z_STAR

    def test_linear_model_closed_form(self):
        """At L = 0 the root is alpha (nu / sigma^2 - 1)."""
        solution = solve_z_star(3.0, 1.5, 0.5, 0)
        assert abs(solution.root - 0.5) < 1e-11

    def test_negative_root_below_zero(self):
        """nu < sigma^{2(L+1)} puts z* in (max(-1, -alpha), 0)."""
        solution = solve_z_star(0.3, 1.0, 0.7, 2)
        assert -0.7 < solution.root < 0.0
        lhs = math.log1p(solution.root / 0.7) + 2 * math.log1p(solution.root)
        assert abs(lhs - math.log(0.3)) < 1e-11

    def test_root_at_zero_when_prior_matches(self):
        """nu = sigma^{2(L+1)} gives z* = 0."""
        solution = solve_z_star(4.0, 2.0, 0.8, 1)
        assert abs(solution.root) < 1e-12

    def test_root_lies_in_bracket(self):
        solution = solve_z_star(7.0, 0.9, 2.0, 3)
        lo, hi = solution.bracket
        assert lo <= solution.root <= hi

    @pytest.mark.parametrize("args", [(0.0, 1.0, 1.0, 1), (1.0, -1.0, 1.0, 1), (1.0, 1.0, 0.0, 1), (1.0, 1.0, 1.0, -1)])
    def test_invalid_arguments(self, args):
        with pytest.raises(InvalidArgsError):
            solve_z_star(*args)


class TestTStar:
    """Test suite for solve_t_star."""

    def test_zero_posterior_depth(self):
        """With lambda_post = 0 the root is nu - 1."""
        assert abs(solve_t_star(2.5, 0.0).root - 1.5) < 1e-11

    def test_unit_root(self):
        """(1 + 1) e^{lambda} = 2e at lambda = 1."""
        assert abs(solve_t_star(2.0 * math.e, 1.0).root - 1.0) < 1e-11

    def test_nu_one_gives_zero(self):
        assert abs(solve_t_star(1.0, 3.0).root) < 1e-15

    def test_invalid_arguments(self):
        with pytest.raises(InvalidArgsError):
            solve_t_star(-1.0, 1.0)
        with pytest.raises(InvalidArgsError):
            solve_t_star(1.0, -0.5)


class TestZeta:
    """Test suite for solve_zeta on general width vectors."""

    def test_equal_widths_reduce_to_z_star(self):
        """For equal widths 2 zeta* = z* with alpha = P / N."""
        spec = NetworkSpecFactory.equal_widths(40, 10, 2, sigma2=1.2)
        data = DataSummaryFactory.from_nu(40, 20, 3.0)
        zeta = solve_zeta(spec, data)
        z = solve_z_star(data.nu, 1.2, 20 / 10, 2).root
        assert abs(2.0 * zeta.zeta_star - z) < 1e-10
        assert zeta.scale_n == 10

    def test_second_order_term_at_zero(self):
        """At zeta* = 0 and k = 0 the correction is -1/2."""
        spec = NetworkSpecFactory.from_widths(30, (10, 15), sigma2=1.0)
        data = DataSummaryFactory.from_nu(30, 12, 1.0)
        zeta = solve_zeta(spec, data)
        assert abs(zeta.zeta_star) < 1e-12
        assert abs(zeta.zeta_star2 + 0.5) < 1e-12

    def test_mismatched_input_dimension(self):
        spec = NetworkSpecFactory.from_widths(30, (10,))
        data = DataSummaryFactory.from_nu(20, 12, 1.0)
        with pytest.raises(InvalidArgsError):
            solve_zeta(spec, data)

    def test_negative_shift_rejected(self, two_layer_spec, small_summary):
        with pytest.raises(InvalidArgsError):
            solve_zeta(two_layer_spec, small_summary, k=-1)


class TestContourShift:
    """Test suite for solve_contour_shift."""

    def test_single_gamma(self):
        """digamma(2 + c) = -sum log theta has c = 1 when the sum is -digamma(3)."""
        solution = solve_contour_shift([2.0], -float(special.digamma(3.0)))
        assert abs(solution.root - 1.0) < 1e-10

    def test_multiplicities_match_repeated_shapes(self):
        repeated = solve_contour_shift([3.0, 3.0, 3.0, 5.0], 0.7)
        grouped = solve_contour_shift([3.0, 5.0], 0.7, multiplicities=[3, 1])
        assert abs(repeated.root - grouped.root) < 1e-10

    def test_root_above_pole_strip(self):
        solution = solve_contour_shift([0.5, 4.0], 25.0)
        assert solution.root > -0.5

    def test_non_positive_shape_rejected(self):
        with pytest.raises(InvalidArgsError):
            solve_contour_shift([0.0, 2.0], 1.0)
