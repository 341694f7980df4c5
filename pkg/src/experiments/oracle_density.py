# src/experiments/oracle_density.py
"""Exact product-of-Gammas density against its Rao-Blackwellized Monte Carlo estimate."""
import math
from typing import Any, Dict, List, NamedTuple, Tuple

import structlog
from pydantic import BaseModel

from src.agent_library.core import BaseExperiment
from src.agent_library.decorators import build_metadata, with_schemas
from src.agent_library.registry import register_experiment
from src.experiments.common import GridPoint
from src.models import DataSummaryFactory, GArgs, NetworkSpecFactory, Subcommand
from src.tools.datagen import derive_seed
from src.tools.meijer_g import log_meijer_g
from src.tools.oracle import MIN_RB_SAMPLES, rb_density_product_gammas

logger = structlog.get_logger()

Z_SCORE_LIMIT = 3.0


class OracleCase(NamedTuple):
    n0: int
    widths: Tuple[int, ...]
    p: int
    nu: float
    sigma2: float

    def g_args(self) -> GArgs:
        spec = NetworkSpecFactory.from_widths(self.n0, self.widths, self.sigma2)
        return GArgs.from_summary(spec, DataSummaryFactory.from_nu(self.n0, self.p, self.nu))


ORACLE_CASES: Dict[str, OracleCase] = {
    "L2_N8-12_P6": OracleCase(n0=12, widths=(8, 12), p=6, nu=2.0, sigma2=1.0),
    "L1_N16_P10": OracleCase(n0=20, widths=(16,), p=10, nu=1.5, sigma2=1.0),
    "L3_N6-10-14_P4": OracleCase(n0=8, widths=(6, 10, 14), p=4, nu=3.0, sigma2=2.0),
}


class OracleDensityRow(BaseModel):
    index: int
    parameter_set: str
    log_density_exact: float
    mc_value: float
    mc_se: float
    z_score: float
    within_limit: bool


ORACLE_DENSITY_METADATA = build_metadata(
    description="Contour-quadrature density of a sum of log-Gamma variables against Monte Carlo.",
    row_schema=OracleDensityRow,
    reads=("n_samples",),
    seeded=True,
    additional_info={"cases": list(ORACLE_CASES)},
)


@register_experiment(
    name="experiment.oracle_density",
    subcommand=Subcommand.ORACLE_DENSITY,
    metadata=ORACLE_DENSITY_METADATA,
)
@with_schemas(grid_point=GridPoint, row=OracleDensityRow)
class OracleDensityExperiment(BaseExperiment):
    """One row per fixed parameter set."""

    columns = ["index", "parameter_set", "log_density_exact", "mc_value", "mc_se", "z_score", "within_limit", "status"]

    def grid(self) -> List[Dict[str, Any]]:
        return [{"index": i, "value": float(i)} for i in range(len(ORACLE_CASES))]

    def failure_row(self, params: Dict[str, Any], error: Exception) -> Dict[str, Any]:
        row = super().failure_row(params, error)
        row["parameter_set"] = list(ORACLE_CASES)[params["index"]]
        return row

    def execute(self, params: Dict[str, Any]) -> Dict[str, Any]:
        name = list(ORACLE_CASES)[params["index"]]
        args = ORACLE_CASES[name].g_args()
        n = max(MIN_RB_SAMPLES, int(self.config.n_samples))

        exact = log_meijer_g(args)
        estimate = rb_density_product_gammas(args, n, derive_seed(self.config.seed, params["index"]))
        z = estimate.z_score(math.exp(exact.log_density))
        logger.info("Oracle density", parameter_set=name, z_score=z, panels=exact.panels)
        return {
            "index": params["index"],
            "parameter_set": name,
            "log_density_exact": exact.log_density,
            "mc_value": estimate.value,
            "mc_se": estimate.std_error,
            "z_score": z,
            "within_limit": abs(z) <= Z_SCORE_LIMIT,
        }
