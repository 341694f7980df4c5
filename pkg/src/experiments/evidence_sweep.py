# src/experiments/evidence_sweep.py
"""
Exact and asymptotic log evidence along one hyperparameter.

sigma2        finite depth, evidence maximized at sigma^2 = nu^{1/(L+1)}
lambda_prior  sigma^2 = 1, L = round(lambda_prior N), maximized at sqrt(1 + log^2 nu) - 1
lambda_post   sigma^2 = 1, L = round(lambda_post N / P), increasing in lambda_post
"""
import math
from typing import Any, Dict, List, Optional

import structlog
from pydantic import BaseModel

from src.agent_library.core import BaseExperiment
from src.agent_library.decorators import build_metadata, with_schemas
from src.agent_library.errors import ConfigError
from src.agent_library.registry import register_experiment
from src.experiments.common import GridPoint, network_from_config, require, resolve_n0
from src.models import DataSummaryFactory, NetworkSpecFactory, Regime, RegimeParamsFactory, Subcommand, SweepVariable
from src.tools.model_select import lambda_prior_star, sigma_star
from src.tools.posterior import log_evidence_asymptotic, log_evidence_exact

logger = structlog.get_logger()


class EvidenceSweepRow(BaseModel):
    index: int
    sweep_var: float
    depth: int
    log_evidence_exact: float
    log_evidence_asymptotic: float
    sigma_star_or_lambda_star_marker: Optional[float] = None


EVIDENCE_SWEEP_METADATA = build_metadata(
    description="Sweeps sigma^2, lambda_prior or lambda_post and tabulates exact against asymptotic log evidence.",
    row_schema=EvidenceSweepRow,
    reads=("sweep", "grid", "nu", "p", "n0", "alpha0", "widths", "width", "depth", "sigma2"),
)


@register_experiment(
    name="experiment.evidence_sweep",
    subcommand=Subcommand.EVIDENCE_SWEEP,
    metadata=EVIDENCE_SWEEP_METADATA,
)
@with_schemas(grid_point=GridPoint, row=EvidenceSweepRow)
class EvidenceSweepExperiment(BaseExperiment):
    """One row per grid value of the swept hyperparameter."""

    columns = [
        "index", "sweep_var", "depth", "log_evidence_exact", "log_evidence_asymptotic",
        "sigma_star_or_lambda_star_marker", "grid_argmax", "status",
    ]

    def check_config(self) -> None:
        require(self.config, "sweep", "grid", "p")
        if self.config.sweep is not SweepVariable.SIGMA2:
            require(self.config, "width")
        resolve_n0(self.config, self.config.p)

    def grid(self) -> List[Dict[str, Any]]:
        return [{"index": i, "value": v} for i, v in enumerate(self.config.grid.values())]

    def execute(self, params: Dict[str, Any]) -> Dict[str, Any]:
        config = self.config
        p = config.p
        n0 = resolve_n0(config, p)
        data = DataSummaryFactory.from_nu(n0, p, config.nu)
        value = params["value"]

        if config.sweep is SweepVariable.SIGMA2:
            spec = network_from_config(config, n0, sigma2=value)
            regime_params = RegimeParamsFactory.from_spec(Regime.FINITE_L, spec, data)
            asymptotic = log_evidence_asymptotic(regime_params, p, n0, width=spec.min_width if spec.depth else None)
            sweep_var, marker = value, sigma_star(config.nu, spec.depth)

        elif config.sweep is SweepVariable.LAMBDA_PRIOR:
            try:
                spec = NetworkSpecFactory.from_lambda_prior(n0, config.width, value)
            except ValueError as e:
                raise ConfigError(str(e)) from e
            regime_params = RegimeParamsFactory.from_spec(Regime.FIXED_LAMBDA_PRIOR, spec, data)
            asymptotic = log_evidence_asymptotic(regime_params, p, n0)
            sweep_var, marker = spec.lambda_prior, lambda_prior_star(config.nu)

        else:
            depth = int(round(value * config.width / p))
            spec = NetworkSpecFactory.equal_widths(n0, config.width, depth)
            regime_params = RegimeParamsFactory.from_spec(Regime.FIXED_LAMBDA_POST, spec, data)
            asymptotic = log_evidence_asymptotic(regime_params, p, n0)
            sweep_var, marker = regime_params.lambda_post, None

        exact = log_evidence_exact(spec, data)
        logger.debug("Evidence sweep point", sweep=config.sweep.value, value=sweep_var, exact=exact, asymptotic=asymptotic)
        return {
            "index": params["index"],
            "sweep_var": sweep_var,
            "depth": spec.depth,
            "log_evidence_exact": exact,
            "log_evidence_asymptotic": asymptotic,
            "sigma_star_or_lambda_star_marker": marker,
        }

    def finalize(self, rows: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
        """Mark the swept value with the largest exact evidence on every row."""
        finite = [r for r in rows if r.get("status") == "ok" and math.isfinite(r["log_evidence_exact"])]
        best = max(finite, key=lambda r: r["log_evidence_exact"])["sweep_var"] if finite else math.nan
        for row in rows:
            row["grid_argmax"] = best
        return rows
