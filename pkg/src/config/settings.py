# src/config/settings.py
"""
Numerical defaults, overridable through DLN_* environment variables.

A .env file in the working directory is honoured via python-dotenv.
"""
import os
from functools import lru_cache
from typing import Any, Callable, Dict, Tuple

import structlog
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator

from src.agent_library.errors import ConfigError

logger = structlog.get_logger()

ENV_PREFIX = "DLN_"
_OVERRIDES: Dict[str, Any] = {}


class NumericsSettings(BaseModel):
    """Tunable defaults for quadrature, root finding and series truncation."""

    quad_tol: float = Field(default=1e-10, ge=1e-12, le=1e-6, description="Relative tolerance of log_meijer_g")
    max_panels: int = Field(default=4000, ge=8, description="Panel budget of the adaptive quadrature")
    truncation_decades: float = Field(default=46.0, gt=0, description="Drop below peak (decades) where the contour is cut")
    series_tol: float = Field(default=1e-14, gt=0, description="Relative size of the last kept char-fn term")
    series_max_terms: int = Field(default=200, ge=1, description="Hard cap on char-fn series terms")
    bisection_width: float = Field(default=1e-3, gt=0, description="Bracket width before Newton polishing")
    newton_max_iter: int = Field(default=100, ge=1)
    log_level: str = Field(default="INFO")
    threads: int = Field(default=1, ge=1, description="Worker processes for grid experiments")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Unknown log level: {v}")
        return level


_ENV_FIELDS: Dict[str, Tuple[str, Callable[[str], Any]]] = {
    "QUAD_TOL": ("quad_tol", float),
    "MAX_PANELS": ("max_panels", int),
    "TRUNCATION_DECADES": ("truncation_decades", float),
    "SERIES_TOL": ("series_tol", float),
    "SERIES_MAX_TERMS": ("series_max_terms", int),
    "BISECTION_WIDTH": ("bisection_width", float),
    "NEWTON_MAX_ITER": ("newton_max_iter", int),
    "LOG_LEVEL": ("log_level", str),
    "THREADS": ("threads", int),
}


def _read_environment() -> Dict[str, Any]:
    values: Dict[str, Any] = {}
    for suffix, (field_name, parse) in _ENV_FIELDS.items():
        raw = os.getenv(ENV_PREFIX + suffix)
        if raw is None or raw == "":
            continue
        try:
            values[field_name] = parse(raw)
        except ValueError as e:
            raise ConfigError(f"{ENV_PREFIX}{suffix}={raw!r} is not a valid {parse.__name__}") from e
    return values


@lru_cache(maxsize=1)
def get_settings() -> NumericsSettings:
    """Load settings once per process."""
    load_dotenv()
    try:
        settings = NumericsSettings(**{**_read_environment(), **_OVERRIDES})
    except ValidationError as e:
        logger.error("Invalid numeric settings", error=str(e))
        raise ConfigError(f"Invalid DLN_* settings: {e}") from e
    return settings


def reset_settings() -> None:
    """Forget cached settings and run overrides so the next call re-reads the environment."""
    _OVERRIDES.clear()
    get_settings.cache_clear()


def apply_overrides(overrides: Dict[str, Any]) -> NumericsSettings:
    """Layer run-level values (such as a RunConfig's tolerances) over the environment."""
    reset_settings()
    _OVERRIDES.update(overrides)
    return get_settings()
