# tests/unit/test_registry.py
"""
Unit tests for the experiment registry and BaseExperiment row handling.
"""
import math
from typing import Any, Dict, List

import pytest
from pydantic import BaseModel, Field

from src.agent_library import registry
from src.agent_library.core import BaseExperiment
from src.agent_library.decorators import build_metadata, ignored_fields, with_schemas
from src.agent_library.errors import ConfigError, InvalidArgsError, QuadratureNonConvergence
from src.agent_library.registry import (
    create_experiment_from_registry,
    get_available_experiments,
    get_experiment_class,
    register_experiment,
)
from src.experiments.double_descent import DoubleDescentExperiment
from src.experiments.validate import ValidateExperiment
from src.models import RunConfig, RunStatus, Subcommand

pytestmark = pytest.mark.unit


class _Point(BaseModel):
    index: int = Field(..., ge=0)
    x: float


class _Row(BaseModel):
    index: int
    x: float
    value: float = Field(..., ge=0)


@with_schemas(grid_point=_Point, row=_Row)
class _FlakyExperiment(BaseExperiment):
    """Fails numerically for negative x and returns a negative value for x > 10."""

    columns = ["index", "x", "value", "status"]

    def grid(self) -> List[Dict[str, Any]]:
        return [{"index": i, "x": float(x)} for i, x in enumerate((1.0, -1.0, 2.0))]

    def execute(self, params: Dict[str, Any]) -> Dict[str, Any]:
        if params["x"] < 0:
            raise QuadratureNonConvergence("panel budget exhausted")
        value = -1.0 if params["x"] > 10 else math.sqrt(params["x"])
        return {"index": params["index"], "x": params["x"], "value": value}


class TestRegistry:
    """Test suite for experiment registration."""

    def test_every_subcommand_registered(self):
        available = get_available_experiments()
        assert set(available) == {s.value for s in Subcommand}
        for key, info in available.items():
            assert info["metadata"]["description"]
            assert info["metadata"]["subcommand"] == key
            assert info["metadata"]["columns"] == info["class"].columns

    def test_lookup(self):
        assert get_experiment_class(Subcommand.VALIDATE) is ValidateExperiment
        experiment = create_experiment_from_registry(RunConfig(subcommand=Subcommand.DOUBLE_DESCENT))
        assert isinstance(experiment, DoubleDescentExperiment)
        assert experiment.experiment_name == "experiment.double_descent"

    def test_available_is_a_copy(self):
        get_available_experiments().clear()
        assert get_available_experiments()

    def test_unregistered_subcommand(self, monkeypatch):
        monkeypatch.setattr(registry, "EXPERIMENT_REGISTRY", {})
        assert get_experiment_class(Subcommand.VALIDATE) is None
        with pytest.raises(ValueError):
            create_experiment_from_registry(RunConfig(subcommand=Subcommand.VALIDATE))

    def test_register_decorator(self, monkeypatch):
        monkeypatch.setattr(registry, "EXPERIMENT_REGISTRY", {})
        metadata = build_metadata(
            "Flaky test experiment", _Row, reads=("n_samples", "nu", "nu"), seeded=True, additional_info={"version": 1},
        )

        decorated = register_experiment("experiment.flaky", Subcommand.VALIDATE, metadata)(_FlakyExperiment)

        entry = registry.EXPERIMENT_REGISTRY["validate"]
        assert decorated is _FlakyExperiment
        assert entry["name"] == "experiment.flaky"
        described = entry["metadata"]
        assert described["row_schema"]["properties"]["value"]["type"] == "number"
        assert described["reads"] == ["n_samples", "nu"]
        assert described["seeded"] is True
        assert described["subcommand"] == "validate"
        assert described["columns"] == ["index", "x", "value", "status"]
        assert described["version"] == 1
        assert "subcommand" not in metadata

    def test_metadata_rejects_unknown_config_field(self):
        with pytest.raises(ValueError):
            build_metadata("Typo", reads=("n_sample",))

    def test_ignored_fields(self):
        metadata = get_available_experiments()["validate"]["metadata"]
        config = RunConfig(subcommand=Subcommand.VALIDATE, n_samples=10, nu=3.0, seed=4, out="x")
        assert ignored_fields(config, metadata) == ["nu"]


class TestBaseExperiment:
    """Test suite for execute_with_validation."""

    @pytest.fixture
    def experiment(self):
        return _FlakyExperiment(RunConfig(subcommand=Subcommand.VALIDATE))

    def test_ok_row(self, experiment):
        row = experiment.execute_with_validation({"index": 0, "x": 4.0})
        assert row == {"index": 0, "x": 4.0, "value": 2.0, "status": RunStatus.OK.value}

    def test_numeric_failure_becomes_status_row(self, experiment):
        row = experiment.execute_with_validation({"index": 1, "x": -1.0})
        assert row["status"] == RunStatus.NUMERIC_FAILURE.value
        assert row["index"] == 1
        assert math.isnan(row["value"])

    def test_invalid_grid_point(self, experiment):
        with pytest.raises(ConfigError):
            experiment.execute_with_validation({"index": -1, "x": 1.0})

    def test_invalid_row(self, experiment):
        with pytest.raises(InvalidArgsError):
            experiment.execute_with_validation({"index": 0, "x": 11.0})

    def test_hooks_default_to_identity(self, experiment, tmp_path):
        rows = [{"index": 0}]
        assert experiment.finalize(rows) is rows
        assert experiment.on_complete(rows, tmp_path) is None
        assert experiment.check_config() is None
