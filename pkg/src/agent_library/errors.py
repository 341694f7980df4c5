# src/agent_library/errors.py
"""
Exception hierarchy shared by tools, experiments and the CLI.

Every error also derives from ValueError or RuntimeError so callers that
catch the built-ins keep working.
"""


class DlnError(Exception):
    """Root of all package errors."""


# ==============================================================================
# INPUT ERRORS
# ==============================================================================

class ConfigError(DlnError, ValueError):
    """Run configuration or environment settings are invalid."""


class InvalidArgsError(DlnError, ValueError):
    """Arguments violate a domain invariant."""


class PoleError(InvalidArgsError):
    """Gamma-family function evaluated at a non-positive integer."""


class InvalidRegimeError(InvalidArgsError):
    """Regime parameters missing or incompatible with the requested expansion."""


class DimensionMismatchError(InvalidArgsError):
    """Vector or matrix dimensions disagree."""


class RankDeficientDesignError(InvalidArgsError):
    """Design matrix fails the relative singular-value test."""


class SingularAlpha0Error(InvalidArgsError):
    """A double-descent grid point sits at the interpolation threshold."""


# ==============================================================================
# NUMERIC FAILURES
# ==============================================================================

class NumericFailure(DlnError, RuntimeError):
    """A numeric routine could not meet its contract."""


class QuadratureNonConvergence(NumericFailure):
    """Adaptive quadrature hit the panel budget before the tolerance."""


class TruncationNotConverged(NumericFailure):
    """Series truncation bound exceeds the requested tolerance."""


class SeriesPrecisionLoss(NumericFailure):
    """Series terms leave double range or cancel below the attainable accuracy."""


# ==============================================================================
# VALIDATION
# ==============================================================================

class ValidationFailure(DlnError):
    """One or more validation checks failed."""

    def __init__(self, message: str, failed_checks=None):
        super().__init__(message)
        self.failed_checks = list(failed_checks or [])
