# src/experiments/double_descent.py
"""Monte Carlo generalization error across alpha0 = P / N0 against its closed form."""
from typing import Any, Dict, List

from pydantic import BaseModel

from src.agent_library.core import BaseExperiment
from src.agent_library.decorators import build_metadata, with_schemas
from src.agent_library.errors import ConfigError
from src.agent_library.registry import register_experiment
from src.experiments.common import GridPoint, require
from src.models import Subcommand
from src.tools.datagen import derive_seed
from src.tools.oracle import MIN_TRIALS, SINGULAR_WINDOW, mc_double_descent_error


class DoubleDescentRow(BaseModel):
    index: int
    alpha0: float
    p: int
    mc_error: float
    mc_se: float
    closed_form: float
    finite_size: float
    bias: float
    bias_se: float
    variance: float
    variance_se: float


DOUBLE_DESCENT_METADATA = build_metadata(
    description="Generalization error of the optimal posterior on Gaussian data, with bias and variance parts.",
    row_schema=DoubleDescentRow,
    reads=("n0", "alpha0_grid", "sigma_eps2", "test_points", "trials"),
    seeded=True,
)


@register_experiment(
    name="experiment.double_descent",
    subcommand=Subcommand.DOUBLE_DESCENT,
    metadata=DOUBLE_DESCENT_METADATA,
)
@with_schemas(grid_point=GridPoint, row=DoubleDescentRow)
class DoubleDescentExperiment(BaseExperiment):
    """One row per alpha0; each row averages config.trials datasets."""

    columns = [
        "index", "alpha0", "p", "mc_error", "mc_se", "closed_form", "finite_size",
        "bias", "bias_se", "variance", "variance_se", "status",
    ]

    def check_config(self) -> None:
        require(self.config, "n0", "alpha0_grid")
        if self.config.trials < MIN_TRIALS:
            raise ConfigError(f"double-descent needs trials >= {MIN_TRIALS}, got {self.config.trials}")
        near = [a for a in self.config.alpha0_grid if abs(a - 1.0) < SINGULAR_WINDOW]
        if near:
            raise ConfigError(f"alpha0 grid must exclude a {SINGULAR_WINDOW} window around 1, got {near}")

    def grid(self) -> List[Dict[str, Any]]:
        return [{"index": i, "value": float(a)} for i, a in enumerate(self.config.alpha0_grid)]

    def execute(self, params: Dict[str, Any]) -> Dict[str, Any]:
        config = self.config
        seed = derive_seed(config.seed, params["index"])
        (point,) = mc_double_descent_error(
            config.n0, [params["value"]], config.sigma_eps2, config.trials, seed, n_test=config.test_points,
        )
        return {
            "index": params["index"],
            "alpha0": point.alpha0,
            "p": point.p,
            "mc_error": point.error.value,
            "mc_se": point.error.std_error,
            "closed_form": point.closed_form,
            "finite_size": point.finite_size,
            "bias": point.bias.value,
            "bias_se": point.bias.std_error,
            "variance": point.variance.value,
            "variance_se": point.variance.std_error,
        }
