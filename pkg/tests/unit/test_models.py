# tests/unit/test_models.py
"""
Unit tests for the pydantic models and factories.
"""
import math

import pytest
from pydantic import ValidationError

from src.models import (
    ComplexValue,
    DataSummary,
    DataSummaryFactory,
    GArgs,
    GridScale,
    GridSpec,
    McEstimate,
    NetworkSpec,
    NetworkSpecFactory,
    Regime,
    RegimeParams,
    RegimeParamsFactory,
    RunConfig,
    SaddleKind,
    SaddleSolution,
    ShiftTarget,
    Subcommand,
    ValidationCheck,
    ValidationReport,
)

pytestmark = pytest.mark.unit


class TestNetworkSpec:
    """Test suite for NetworkSpec and its factory."""

    def test_properties(self, two_layer_spec):
        assert two_layer_spec.depth == 2
        assert two_layer_spec.all_widths == (12, 8, 12)
        assert two_layer_spec.min_width == 8
        assert abs(two_layer_spec.lambda_prior - (1 / 8 + 1 / 12)) < 1e-15

    def test_no_hidden_layers(self, linear_spec):
        assert linear_spec.depth == 0
        assert linear_spec.min_width == 10
        assert linear_spec.lambda_prior == 0.0

    def test_widths_coerced_to_tuple(self):
        assert NetworkSpec(n0=3, widths=[4, 5]).widths == (4, 5)

    def test_invalid_width(self):
        with pytest.raises(ValidationError):
            NetworkSpec(n0=3, widths=(4, 0))

    def test_invalid_prior_scale(self):
        with pytest.raises(ValidationError):
            NetworkSpec(n0=3, sigma2=0.0)

    def test_frozen(self, two_layer_spec):
        with pytest.raises(ValidationError):
            two_layer_spec.sigma2 = 2.0

    def test_with_sigma2(self, two_layer_spec):
        changed = two_layer_spec.with_sigma2(3.0)
        assert changed.sigma2 == 3.0
        assert changed.widths == two_layer_spec.widths

    def test_from_lambda_prior(self):
        spec = NetworkSpecFactory.from_lambda_prior(20, 50, 0.1)
        assert spec.depth == 5
        assert spec.widths == (50,) * 5

    def test_from_lambda_prior_too_small(self):
        with pytest.raises(ValueError):
            NetworkSpecFactory.from_lambda_prior(20, 50, 0.001)

    def test_negative_depth(self):
        with pytest.raises(ValueError):
            NetworkSpecFactory.equal_widths(20, 50, -1)


class TestDataSummary:
    """Test suite for DataSummary and GArgs."""

    def test_computed_fields(self, small_summary):
        assert small_summary.alpha0 == 0.5
        assert abs(small_summary.nu - 2.0) < 1e-15
        dumped = small_summary.model_dump()
        assert "alpha0" in dumped and "nu" in dumped

    def test_more_points_than_dimensions(self):
        with pytest.raises(ValidationError):
            DataSummary(n0=4, p=5, theta_star_norm2=1.0)

    def test_b_parameters(self, two_layer_spec, small_summary):
        args = GArgs.from_summary(two_layer_spec, small_summary)
        assert args.b_parameters() == [3.0, 4.0, 6.0]
        assert args.shifted(2).b_parameters() == [3.0, 6.0, 8.0]
        assert args.shifted(1, ShiftTarget.DATA).b_parameters() == [4.0, 4.0, 6.0]

    def test_shift_target(self, two_layer_spec, small_summary):
        args = GArgs.from_summary(two_layer_spec, small_summary, k_data=1)
        assert args.shift_target is ShiftTarget.DATA
        assert args.shifted(3).k_data == 0

    def test_only_one_shift(self, two_layer_spec, small_summary):
        with pytest.raises(ValidationError):
            GArgs.from_summary(two_layer_spec, small_summary, k_widths=1, k_data=1)

    def test_mismatched_dimension(self, small_summary):
        with pytest.raises(ValueError):
            GArgs.from_summary(NetworkSpecFactory.from_widths(13, (8,)), small_summary)


class TestRegimeParams:
    """Test suite for RegimeParams validation and derivation."""

    def test_finite_depth_needs_alpha_and_depth(self):
        with pytest.raises(ValidationError):
            RegimeParams(regime=Regime.FINITE_L, nu=2.0, alpha=0.5)

    def test_lambda_regimes_need_unit_prior_scale(self):
        with pytest.raises(ValidationError):
            RegimeParams(regime=Regime.FIXED_LAMBDA_PRIOR, nu=2.0, lambda_prior=0.1, sigma2=2.0)
        with pytest.raises(ValidationError):
            RegimeParams(regime=Regime.FIXED_LAMBDA_POST, nu=2.0, lambda_post=0.1, sigma2=2.0)

    def test_lambda_regimes_need_lambda(self):
        with pytest.raises(ValidationError):
            RegimeParams(regime=Regime.FIXED_LAMBDA_POST, nu=2.0)

    def test_for_regime(self):
        params = RegimeParamsFactory.for_regime(Regime.FIXED_LAMBDA_POST, nu=2.0, width=100, p=50, depth=4)
        assert params.lambda_post == 2.0
        params = RegimeParamsFactory.for_regime(Regime.FINITE_L, nu=2.0, width=100, p=50, depth=4)
        assert params.alpha == 0.5 and params.depth == 4

    def test_from_spec_uses_exact_lambda_prior(self, two_layer_spec, small_summary):
        params = RegimeParamsFactory.from_spec(Regime.FIXED_LAMBDA_PRIOR, two_layer_spec, small_summary)
        assert params.lambda_prior == two_layer_spec.lambda_prior
        params = RegimeParamsFactory.from_spec(Regime.FINITE_L, two_layer_spec, small_summary)
        assert params.alpha == 6 / 8


class TestResultModels:
    """Test suite for small result models."""

    def test_complex_round_trip(self):
        value = ComplexValue.from_complex(complex(0.5, -1.5))
        assert value.to_complex() == complex(0.5, -1.5)
        assert abs(value) == math.hypot(0.5, 1.5)

    def test_complex_rejects_nan(self):
        with pytest.raises(ValidationError):
            ComplexValue(re=math.nan, im=0.0)

    def test_saddle_root_inside_bracket(self):
        with pytest.raises(ValidationError):
            SaddleSolution(root=2.0, residual=0.0, iterations=1, bracket=(0.0, 1.0), kind=SaddleKind.Z_STAR)

    def test_z_score(self):
        estimate = McEstimate(value=1.2, std_error=0.1, n_samples=100, seed=0)
        assert abs(estimate.z_score(1.0) - 2.0) < 1e-12

    def test_z_score_without_error(self):
        exact = McEstimate(value=1.0, std_error=0.0, n_samples=10, seed=0)
        assert exact.z_score(1.0) == 0.0
        assert exact.z_score(1.1) == math.inf

    def test_validation_report(self):
        report = ValidationReport(checks=[
            ValidationCheck(name="a", passed=True, measured=0.0, tolerance=1.0),
            ValidationCheck(name="b", passed=False, measured=2.0, tolerance=1.0),
        ])
        assert not report.passed
        assert [check.name for check in report.failed] == ["b"]
        assert ValidationReport().passed


class TestRunConfig:
    """Test suite for GridSpec and RunConfig."""

    def test_linear_grid(self):
        assert GridSpec(min=0.0, max=1.0, count=3).values() == [0.0, 0.5, 1.0]

    def test_log_grid(self):
        values = GridSpec(min=1.0, max=100.0, count=3, scale=GridScale.LOG).values()
        assert values[0] == 1.0
        assert abs(values[1] - 10.0) < 1e-12
        assert abs(values[2] - 100.0) < 1e-10

    def test_single_point_grid(self):
        assert GridSpec(min=2.0, max=5.0, count=1).values() == [2.0]

    @pytest.mark.parametrize("payload", [
        {"min": 2.0, "max": 1.0, "count": 3},
        {"min": 0.0, "max": 1.0, "count": 3, "scale": "log"},
        {"min": 0.0, "max": 1.0, "count": 0},
    ])
    def test_invalid_grid(self, payload):
        with pytest.raises(ValidationError):
            GridSpec(**payload)

    def test_parses_json(self):
        config = RunConfig.model_validate_json(
            '{"subcommand": "evidence-sweep", "n0": 20, "sweep": "sigma2",'
            ' "grid": {"min": 0.5, "max": 2.0, "count": 4, "scale": "log"}}'
        )
        assert config.subcommand is Subcommand.EVIDENCE_SWEEP
        assert config.grid.scale is GridScale.LOG
        assert config.seed == 0

    def test_unknown_tolerance(self):
        with pytest.raises(ValidationError):
            RunConfig(subcommand=Subcommand.VALIDATE, tolerances={"newton_tol": 1e-8})

    def test_seed_range(self):
        assert RunConfig(subcommand=Subcommand.VALIDATE, seed=2**64 - 1).seed == 2**64 - 1
        with pytest.raises(ValidationError):
            RunConfig(subcommand=Subcommand.VALIDATE, seed=2**64)

    def test_invalid_widths(self):
        with pytest.raises(ValidationError):
            RunConfig(subcommand=Subcommand.EVIDENCE_SWEEP, widths=[4, 0])
