# src/experiments/common.py
"""Helpers shared by the experiments: config checks and network construction."""
from typing import Optional

from pydantic import BaseModel, Field

from src.agent_library.errors import ConfigError
from src.models import NetworkSpec, NetworkSpecFactory, RunConfig


class GridPoint(BaseModel):
    """One grid value and its position."""

    index: int = Field(..., ge=0)
    value: float


def require(config: RunConfig, *fields: str) -> None:
    """Raise ConfigError naming every listed field that is unset."""
    missing = [name for name in fields if getattr(config, name) is None]
    if missing:
        raise ConfigError(f"Subcommand {config.subcommand.value} needs: {', '.join(missing)}")


def resolve_n0(config: RunConfig, p: int) -> int:
    """config.n0, or P / alpha0 rounded when n0 is not given."""
    n0 = config.n0 if config.n0 is not None else int(round(p / config.alpha0))
    if n0 < p:
        raise ConfigError(f"Need N0 >= P, got N0={n0}, P={p}")
    return n0


def network_from_config(config: RunConfig, n0: int, sigma2: Optional[float] = None) -> NetworkSpec:
    """Explicit widths if given, else depth layers of the configured width."""
    sigma2 = config.sigma2 if sigma2 is None else sigma2
    try:
        if config.widths is not None:
            return NetworkSpecFactory.from_widths(n0, config.widths, sigma2)
        if config.depth == 0:
            return NetworkSpecFactory.equal_widths(n0, 1, 0, sigma2)
        require(config, "width", "depth")
        return NetworkSpecFactory.equal_widths(n0, config.width, config.depth, sigma2)
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(f"Invalid network: {e}") from e
