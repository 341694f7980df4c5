# src/experiments/__init__.py
"""Importing this package registers every experiment."""
from . import double_descent, evidence_sweep, oracle_density, posterior_variance, validate

__all__ = ["double_descent", "evidence_sweep", "oracle_density", "posterior_variance", "validate"]
