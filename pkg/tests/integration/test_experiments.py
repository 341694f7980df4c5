# tests/integration/test_experiments.py
"""
Integration tests running each experiment end to end through ExperimentRunner.
"""
import pandas as pd
import pytest

from src.agent_library.errors import ConfigError
from src.experiments.oracle_density import ORACLE_CASES
from src.models import Regime, RunConfig, Subcommand
from src.orchestrators.experiment_runner import ExperimentRunner

pytestmark = pytest.mark.integration


def _run(tmp_path, **fields):
    config = RunConfig(out=str(tmp_path), **fields)
    manifest = ExperimentRunner(config).run()
    return pd.read_csv(manifest.csv_path), manifest


class TestDoubleDescent:
    """Test suite for the double-descent experiment."""

    def test_monte_carlo_matches_finite_size(self, tmp_path):
        frame, manifest = _run(
            tmp_path, subcommand=Subcommand.DOUBLE_DESCENT, n0=40, alpha0_grid=[0.5, 2.0], trials=200, seed=1,
        )
        assert manifest.rows == 2
        assert list(frame["p"]) == [20, 80]
        assert list(frame["closed_form"]) == [2.0, 0.25]
        assert (abs(frame["mc_error"] - frame["finite_size"]) < 4.0 * frame["mc_se"]).all()
        assert frame["variance"].iloc[1] == 0.0

    def test_too_few_trials(self, tmp_path):
        config = RunConfig(subcommand=Subcommand.DOUBLE_DESCENT, n0=40, alpha0_grid=[0.5], trials=50, out=str(tmp_path))
        with pytest.raises(ConfigError):
            ExperimentRunner(config).run()

    @pytest.mark.slow
    def test_curve_near_closed_form(self, tmp_path):
        """At N0 = 200 the finite-size expectation is within a few percent of the N0 -> infinity curve."""
        frame, _ = _run(
            tmp_path, subcommand=Subcommand.DOUBLE_DESCENT, n0=200, alpha0_grid=[0.25, 0.5, 0.75, 1.5, 2.0],
            trials=400, seed=2,
        )
        assert (abs(frame["mc_error"] - frame["finite_size"]) < 4.0 * frame["mc_se"]).all()
        assert (abs(frame["finite_size"] - frame["closed_form"]) < 0.1 * frame["closed_form"]).all()


class TestOracleDensity:
    """Test suite for the oracle-density experiment."""

    def test_every_case_agrees(self, tmp_path):
        frame, _ = _run(tmp_path, subcommand=Subcommand.ORACLE_DENSITY, n_samples=20_000, seed=3)
        assert list(frame["parameter_set"]) == list(ORACLE_CASES)
        assert (frame["status"] == "ok").all()
        assert (frame["z_score"].abs() < 4.0).all()


class TestPosteriorVariance:
    """Test suite for the posterior-variance experiment."""

    def test_finite_depth_gap_shrinks(self, tmp_path):
        frame, _ = _run(
            tmp_path, subcommand=Subcommand.POSTERIOR_VARIANCE, regime=Regime.FINITE_L,
            n_values=[50, 200], depth=1, alpha=0.5, nu=2.0,
        )
        gaps = (frame["c_exact"] - frame["c_limit"]).abs()
        assert list(frame["p"]) == [25, 100]
        assert list(frame["n0"]) == [50, 200]
        assert gaps.iloc[1] < gaps.iloc[0]

    def test_fixed_prior_depth_gap_approaches_constant(self, tmp_path):
        frame, _ = _run(
            tmp_path, subcommand=Subcommand.POSTERIOR_VARIANCE, regime=Regime.FIXED_LAMBDA_PRIOR,
            n_values=[100, 400], lambda_prior=0.1, alpha=0.5, nu=1.5,
        )
        assert list(frame["depth"]) == [10, 40]
        assert (frame["c_limit"] == 1.0).all()
        misfit = (frame["N_times_gap"] - frame["scaling_constant"]).abs()
        assert misfit.iloc[1] < misfit.iloc[0]

    def test_fixed_posterior_depth_log_g_expansion(self, tmp_path):
        """N = 400, P = 20 and lambda_post = 2 round to L = 40 layers."""
        frame, _ = _run(
            tmp_path, subcommand=Subcommand.POSTERIOR_VARIANCE, regime=Regime.FIXED_LAMBDA_POST,
            n_values=[400], lambda_post=2.0, p=20, n0=40, nu=2.0,
        )
        assert list(frame["depth"]) == [40]
        assert (frame["status"] == "ok").all()
        assert abs(frame["log_g_exact"].iloc[0] - frame["log_g_asymptotic"].iloc[0]) < 0.2

    def test_lambda_regime_needs_unit_prior_scale(self, tmp_path):
        config = RunConfig(
            subcommand=Subcommand.POSTERIOR_VARIANCE, regime=Regime.FIXED_LAMBDA_POST,
            n_values=[100], lambda_post=1.0, p=50, sigma2=2.0, out=str(tmp_path),
        )
        with pytest.raises(ConfigError):
            ExperimentRunner(config).run()


class TestValidate:
    """Test suite for the full invariant suite."""

    @pytest.mark.slow
    def test_all_checks_pass(self, tmp_path):
        frame, _ = _run(tmp_path, subcommand=Subcommand.VALIDATE, n_samples=100_000, seed=0)
        assert len(frame) == 8
        assert frame["passed"].all()
        assert (tmp_path / "validation_report.json").exists()
