# src/experiments/posterior_variance.py
"""
Exact posterior variance against its large-width limit along a width sequence.

The gap c_N - c between the exact variance factor and its limit decays like
C/N; the N_times_gap column is what a scaling-law fit reads. Each row also
carries the exact log G next to the regime's large-width expansion of it.
"""
import math
from typing import Any, Dict, List, Optional

import structlog
from pydantic import BaseModel

from src.agent_library.core import BaseExperiment
from src.agent_library.decorators import build_metadata, with_schemas
from src.agent_library.errors import ConfigError
from src.agent_library.registry import register_experiment
from src.experiments.common import GridPoint, require, resolve_n0
from src.models import (
    DataSummaryFactory,
    GArgs,
    NetworkSpec,
    NetworkSpecFactory,
    Regime,
    RegimeParams,
    RegimeParamsFactory,
    Subcommand,
)
from src.tools.asymptotics import (
    log_g_case_a,
    log_g_case_b,
    log_g_case_c,
    scaling_constant,
    variance_factor_limit,
)
from src.tools.meijer_g import log_meijer_g
from src.tools.posterior import posterior_variance_exact

logger = structlog.get_logger()


class PosteriorVarianceRow(BaseModel):
    index: int
    N: int
    depth: int
    p: int
    n0: int
    var_exact: float
    var_limit: float
    c_exact: float
    c_limit: float
    N_times_gap: float
    log_g_exact: float
    log_g_asymptotic: float
    scaling_constant: Optional[float] = None


POSTERIOR_VARIANCE_METADATA = build_metadata(
    description="Exact perpendicular posterior variance and its regime limit for a sequence of widths.",
    row_schema=PosteriorVarianceRow,
    reads=(
        "regime", "n_values", "nu", "sigma2", "alpha", "alpha0", "n0", "p", "depth",
        "lambda_prior", "lambda_post", "x_perp_norm2",
    ),
)


@register_experiment(
    name="experiment.posterior_variance",
    subcommand=Subcommand.POSTERIOR_VARIANCE,
    metadata=POSTERIOR_VARIANCE_METADATA,
)
@with_schemas(grid_point=GridPoint, row=PosteriorVarianceRow)
class PosteriorVarianceExperiment(BaseExperiment):
    """One row per width N."""

    columns = [
        "index", "N", "depth", "p", "n0", "var_exact", "var_limit", "c_exact", "c_limit",
        "N_times_gap", "scaling_constant", "log_g_exact", "log_g_asymptotic", "status",
    ]

    def check_config(self) -> None:
        config = self.config
        require(config, "regime", "n_values")
        if config.regime is Regime.FINITE_L:
            require(config, "depth", "alpha")
        elif config.regime is Regime.FIXED_LAMBDA_PRIOR:
            require(config, "lambda_prior")
            if config.alpha is None:
                require(config, "p")
        else:
            require(config, "lambda_post", "p")
        if config.regime is not Regime.FINITE_L and config.sigma2 != 1.0:
            raise ConfigError(f"Regime {config.regime.value} requires sigma2 = 1")

    def grid(self) -> List[Dict[str, Any]]:
        return [{"index": i, "value": float(n)} for i, n in enumerate(self.config.n_values)]

    def _sizes(self, width: int) -> Dict[str, int]:
        config = self.config
        if config.regime is Regime.FINITE_L:
            p = int(round(config.alpha * width))
            return {"p": p, "depth": config.depth, "n0": int(round(p / config.alpha0))}
        if config.regime is Regime.FIXED_LAMBDA_PRIOR:
            p = int(round(config.alpha * width)) if config.alpha is not None else config.p
            depth = int(round(config.lambda_prior * width))
        else:
            p = config.p
            depth = int(round(config.lambda_post * width / p))
        if depth == 0:
            raise ConfigError(f"Regime {config.regime.value} rounds to zero hidden layers at N={width}")
        return {"p": p, "depth": depth, "n0": resolve_n0(config, p)}

    @staticmethod
    def _log_g_expansion(regime_params: RegimeParams, spec: NetworkSpec, width: int, p: int) -> float:
        if regime_params.regime is Regime.FINITE_L:
            return log_g_case_a(width, regime_params)
        if regime_params.regime is Regime.FIXED_LAMBDA_PRIOR:
            return log_g_case_b(spec.widths, p, regime_params)
        return log_g_case_c(width, p, spec.depth, regime_params)

    def execute(self, params: Dict[str, Any]) -> Dict[str, Any]:
        config = self.config
        width = int(params["value"])
        sizes = self._sizes(width)
        p, depth, n0 = sizes["p"], sizes["depth"], sizes["n0"]
        if n0 < p:
            raise ConfigError(f"N0={n0} is below P={p} at N={width}")

        sigma2 = config.sigma2 if config.regime is Regime.FINITE_L else 1.0
        spec = NetworkSpecFactory.equal_widths(n0, width, depth, sigma2)
        data = DataSummaryFactory.from_nu(n0, p, config.nu)
        regime_params = RegimeParamsFactory.from_spec(config.regime, spec, data, width=width)

        x_perp_norm2 = config.x_perp_norm2
        var_exact = posterior_variance_exact(spec, data, x_perp_norm2)
        c_limit = variance_factor_limit(regime_params)
        unit = data.nu * x_perp_norm2 / n0
        var_limit = c_limit * unit
        c_exact = var_exact / unit if unit > 0 else math.nan

        constant = None
        if config.regime is Regime.FIXED_LAMBDA_PRIOR and depth > 0:
            constant = scaling_constant(spec.lambda_prior, p / width, data.nu)

        log_g_exact = log_meijer_g(GArgs.from_summary(spec, data)).log_value
        log_g_asymptotic = self._log_g_expansion(regime_params, spec, width, p)

        logger.debug("Posterior variance point", N=width, depth=depth, c_exact=c_exact, c_limit=c_limit)
        return {
            "index": params["index"],
            "N": width,
            "depth": depth,
            "p": p,
            "n0": n0,
            "var_exact": var_exact,
            "var_limit": var_limit,
            "c_exact": c_exact,
            "c_limit": c_limit,
            "N_times_gap": width * (c_exact - c_limit),
            "scaling_constant": constant,
            "log_g_exact": log_g_exact,
            "log_g_asymptotic": log_g_asymptotic,
        }
