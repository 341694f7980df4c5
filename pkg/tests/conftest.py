# tests/conftest.py

import pytest
import structlog

# Import all experiment modules so they are registered in EXPERIMENT_REGISTRY.
# Python's import system runs the @register_experiment decorators in these files.
import src.experiments  # noqa: F401
from src.config import reset_settings
from src.config.settings import ENV_PREFIX
from src.models import DataSummaryFactory, NetworkSpecFactory
from src.tools.datagen import generate, min_norm_interpolant


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch):
    """Every test starts from default numerics and logging, without DLN_* variables or run overrides."""
    import os

    for name in list(os.environ):
        if name.startswith(ENV_PREFIX):
            monkeypatch.delenv(name, raising=False)
    reset_settings()
    yield
    reset_settings()
    structlog.reset_defaults()


@pytest.fixture
def two_layer_spec():
    """Two hidden layers of unequal width on a 12-dimensional input."""
    return NetworkSpecFactory.from_widths(12, (8, 12), sigma2=1.0)


@pytest.fixture
def linear_spec():
    """No hidden layers."""
    return NetworkSpecFactory.equal_widths(10, 1, 0, sigma2=1.5)


@pytest.fixture
def small_summary():
    """N0 = 12, P = 6, nu = 2."""
    return DataSummaryFactory.from_nu(12, 6, 2.0)


@pytest.fixture
def small_dataset():
    """Seeded Gaussian dataset with P < N0."""
    return generate(20, 8, 0.1, seed=7)


@pytest.fixture
def small_geometry(small_dataset):
    return min_norm_interpolant(small_dataset)
