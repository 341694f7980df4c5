# src/agent_library/registry.py
"""
Registry of experiments, keyed by CLI subcommand.
"""
from typing import Any, Dict, Optional, Type

import structlog

from src.models import RunConfig, Subcommand

logger = structlog.get_logger()

# Global registry, populated on import of src.experiments
EXPERIMENT_REGISTRY: Dict[str, Dict[str, Any]] = {}


def register_experiment(name: str, subcommand: Subcommand, metadata: Dict[str, Any]):
    """
    Decorator that registers an experiment class under its subcommand.

    Example:
        @register_experiment(
            name="experiment.double_descent",
            subcommand=Subcommand.DOUBLE_DESCENT,
            metadata=DOUBLE_DESCENT_METADATA,
        )
        class DoubleDescentExperiment(BaseExperiment):
            ...
    """
    def decorator(cls):
        described = {**metadata, "subcommand": subcommand.value, "columns": list(cls.columns)}
        EXPERIMENT_REGISTRY[subcommand.value] = {
            "class": cls,
            "name": name,
            "subcommand": subcommand,
            "metadata": described,
        }
        cls._experiment_name = name
        cls._subcommand = subcommand
        cls._metadata = described

        logger.debug("Experiment registered", name=name, subcommand=subcommand.value, class_name=cls.__name__)
        return cls

    return decorator


def get_available_experiments() -> Dict[str, Dict[str, Any]]:
    """Return all registered experiments with their metadata."""
    return EXPERIMENT_REGISTRY.copy()


def get_experiment_class(subcommand: Subcommand) -> Optional[Type]:
    info = EXPERIMENT_REGISTRY.get(subcommand.value)
    return info["class"] if info else None


def create_experiment_from_registry(config: RunConfig) -> Any:
    """
    Instantiate the experiment registered for config.subcommand.

    Raises:
        ValueError: If nothing is registered for the subcommand
    """
    ExperimentClass = get_experiment_class(config.subcommand)
    if ExperimentClass is None:
        raise ValueError(f"No experiment registered for subcommand: {config.subcommand.value}")
    experiment = ExperimentClass(config)
    logger.debug("Experiment created", subcommand=config.subcommand.value, class_name=ExperimentClass.__name__)
    return experiment
