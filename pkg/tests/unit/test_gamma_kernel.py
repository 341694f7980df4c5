# tests/unit/test_gamma_kernel.py
"""
Unit tests for the complex log-Gamma, digamma and trigamma kernels.
Reference values come from scipy.special and mpmath.
"""
import math

import mpmath
import numpy as np
import pytest
from scipy import special

from src.agent_library.errors import PoleError
from src.tools.gamma_kernel import (
    digamma,
    digamma_real,
    log_gamma,
    log_gamma_real,
    trigamma,
    trigamma_real,
)

pytestmark = pytest.mark.unit


class TestLogGamma:
    """Test suite for log_gamma."""

    @pytest.fixture
    def real_points(self):
        return np.array([0.1, 0.5, 1.5, 2.5, 7.25, 9.99, 10.0, 37.2, 1e3, 1e6])

    @pytest.fixture
    def complex_points(self):
        return np.array([0.5 + 3j, 2.0 - 10j, 40.0 + 100j, 1e-3 + 1e-3j, 5.0 + 1e3j])

    def test_real_axis_matches_scipy(self, real_points):
        """Test that log_gamma agrees with scipy's gammaln on the positive axis."""
        np.testing.assert_allclose(log_gamma_real(real_points), special.gammaln(real_points), rtol=1e-12, atol=1e-13)

    def test_complex_matches_scipy_principal_branch(self, complex_points):
        """Test that the complex values follow the principal branch used by scipy.special.loggamma."""
        np.testing.assert_allclose(log_gamma(complex_points), special.loggamma(complex_points), rtol=1e-12, atol=1e-12)

    def test_complex_matches_mpmath(self):
        """Test one point against a 30-digit reference."""
        z = 3.3 - 7.1j
        with mpmath.workdps(30):
            reference = complex(mpmath.loggamma(mpmath.mpc(z.real, z.imag)))
        assert abs(log_gamma(z) - reference) < 1e-12 * abs(reference)

    def test_scalar_in_scalar_out(self):
        """Test that a scalar argument returns a scalar."""
        value = log_gamma_real(5.0)
        assert np.ndim(value) == 0
        assert abs(float(value) - math.log(24.0)) < 1e-13

    def test_recurrence(self):
        """Test log Gamma(z + 1) = log Gamma(z) + log z off the real axis."""
        z = 1.7 + 2.3j
        assert abs(log_gamma(z + 1) - (log_gamma(z) + np.log(z))) < 1e-12

    def test_negative_non_integer_real_part(self):
        """Test that the real part at a negative non-integer is log |Gamma|."""
        assert abs(log_gamma(-2.5).real - special.gammaln(-2.5)) < 1e-11

    @pytest.mark.parametrize("pole", [0.0, -1.0, -7.0])
    def test_poles_raise(self, pole):
        """Test that non-positive integers raise PoleError."""
        with pytest.raises(PoleError):
            log_gamma(pole)

    def test_pole_in_array_raises(self):
        """Test that one pole anywhere in the input is rejected."""
        with pytest.raises(PoleError):
            log_gamma(np.array([1.5, -3.0, 2.0]))


class TestPolygamma:
    """Test suite for digamma and trigamma."""

    @pytest.fixture
    def points(self):
        return np.array([0.25, 1.0, 3.0, 9.5, 12.0, 250.0, 5e4])

    def test_digamma_matches_scipy(self, points):
        np.testing.assert_allclose(digamma_real(points), special.digamma(points), rtol=1e-12, atol=1e-13)

    def test_trigamma_matches_scipy(self, points):
        np.testing.assert_allclose(trigamma_real(points), special.polygamma(1, points), rtol=1e-11)

    def test_complex_digamma_matches_mpmath(self):
        z = 0.8 + 4.5j
        with mpmath.workdps(30):
            reference = complex(mpmath.digamma(mpmath.mpc(z.real, z.imag)))
        assert abs(digamma(z) - reference) < 1e-12 * abs(reference)

    def test_complex_trigamma_matches_mpmath(self):
        z = 2.0 - 1.5j
        with mpmath.workdps(30):
            reference = complex(mpmath.psi(1, mpmath.mpc(z.real, z.imag)))
        assert abs(trigamma(z) - reference) < 1e-11 * abs(reference)

    def test_digamma_pole_raises(self):
        with pytest.raises(PoleError):
            digamma(-2.0)

    def test_digamma_is_derivative_of_log_gamma(self):
        """Test digamma against a central difference of log_gamma."""
        x, h = 4.2, 1e-5
        numeric = (log_gamma_real(x + h) - log_gamma_real(x - h)) / (2 * h)
        assert abs(numeric - digamma_real(x)) < 1e-8
