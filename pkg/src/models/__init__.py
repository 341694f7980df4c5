"""
Unified model system for the deep linear network toolkit.
"""

# Import all enums
from .enums import *

# Import base models
from .base_models import (
    ComplexValue,
    NetworkSpec,
    DataSummary,
    GArgs
)

# Import specialized models
from .specialized_models import (
    QuadratureReport,
    SaddleSolution,
    ZetaSolution,
    RegimeParams,
    PosteriorSummary,
    CharFnSeries,
    SelectionReport,
    McEstimate,
    DoubleDescentPoint,
    Dataset,
    Geometry
)

# Import aggregation models
from .aggregation_models import (
    GridSpec,
    RunConfig,
    RunManifest,
    ValidationCheck,
    ValidationReport
)

# Import factories
from .factories import (
    NetworkSpecFactory,
    DataSummaryFactory,
    RegimeParamsFactory
)

__all__ = [
    # Enums
    'Regime',
    'ShiftTarget',
    'SaddleKind',
    'Subcommand',
    'SweepVariable',
    'GridScale',
    'RunStatus',
    'VarianceScale',

    # Base models
    'ComplexValue',
    'NetworkSpec',
    'DataSummary',
    'GArgs',

    # Specialized models
    'QuadratureReport',
    'SaddleSolution',
    'ZetaSolution',
    'RegimeParams',
    'PosteriorSummary',
    'CharFnSeries',
    'SelectionReport',
    'McEstimate',
    'DoubleDescentPoint',
    'Dataset',
    'Geometry',

    # Aggregation
    'GridSpec',
    'RunConfig',
    'RunManifest',
    'ValidationCheck',
    'ValidationReport',

    # Factories
    'NetworkSpecFactory',
    'DataSummaryFactory',
    'RegimeParamsFactory'
]
