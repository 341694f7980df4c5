# src/models/enums.py
"""
Centralized enum definitions.
Values are the strings used on the command line, in CSV columns and in JSON.
"""
from enum import Enum

# ==============================================================================
# ASYMPTOTIC REGIMES
# ==============================================================================

class Regime(str, Enum):
    """Joint scalings of width, depth and dataset size."""
    FINITE_L = "finite_L"
    FIXED_LAMBDA_PRIOR = "fixed_lambda_prior"
    FIXED_LAMBDA_POST = "fixed_lambda_post"

class ShiftTarget(str, Enum):
    """Which b-parameters an integer shift k is applied to."""
    WIDTHS = "widths"
    DATA = "data"

class SaddleKind(str, Enum):
    """Saddle-point equations solved by the saddle tool."""
    Z_STAR = "z_star"
    T_STAR = "t_star"
    ZETA_STAR = "zeta_star"
    CONTOUR_SHIFT = "contour_shift"

# ==============================================================================
# HARNESS ENUMS
# ==============================================================================

class Subcommand(str, Enum):
    """CLI subcommands."""
    EVIDENCE_SWEEP = "evidence-sweep"
    POSTERIOR_VARIANCE = "posterior-variance"
    DOUBLE_DESCENT = "double-descent"
    VALIDATE = "validate"
    ORACLE_DENSITY = "oracle-density"

class SweepVariable(str, Enum):
    """Parameter swept by evidence-sweep."""
    SIGMA2 = "sigma2"
    LAMBDA_PRIOR = "lambda_prior"
    LAMBDA_POST = "lambda_post"

class GridScale(str, Enum):
    """Spacing of a parameter grid."""
    LINEAR = "linear"
    LOG = "log"

class RunStatus(str, Enum):
    """Per-row outcome in experiment CSVs."""
    OK = "ok"
    NUMERIC_FAILURE = "numeric_failure"

class VarianceScale(str, Enum):
    """Squared-norm scale of the perpendicular predictive variance in the double-descent experiment."""
    TARGET_NORM = "target_norm"
    INTERPOLANT_NORM = "interpolant_norm"
