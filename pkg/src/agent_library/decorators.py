# src/agent_library/decorators.py
"""
Decorators and helpers that describe an experiment to the runner.
"""
from typing import Any, Dict, Iterable, List, Optional, Type

from pydantic import BaseModel

from src.models import RunConfig

# Fields every run carries whatever the subcommand
RUN_FIELDS = frozenset({"subcommand", "seed", "out", "threads", "tolerances"})


def with_schemas(grid_point: Optional[Type[BaseModel]] = None, row: Optional[Type[BaseModel]] = None):
    """
    Attach the grid-point and row models checked by execute_with_validation.

    Example:
        @with_schemas(grid_point=GridPoint, row=DoubleDescentRow)
        class DoubleDescentExperiment(BaseExperiment):
            ...
    """
    def decorator(cls):
        if grid_point:
            cls._grid_point_schema = grid_point
        if row:
            cls._row_schema = row
        return cls
    return decorator


def build_metadata(
    description: str,
    row_schema: Optional[Type[BaseModel]] = None,
    reads: Iterable[str] = (),
    seeded: bool = False,
    additional_info: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """
    Describe an experiment for the registry.

    Args:
        description: One-line summary
        row_schema: Row model; its JSON schema documents the CSV
        reads: RunConfig fields the experiment uses beyond RUN_FIELDS
        seeded: Whether the rows depend on RunConfig.seed
        additional_info: Extra keys, e.g. the oracle parameter sets

    Raises:
        ValueError: If reads names a field RunConfig does not have
    """
    reads = sorted(set(reads))
    unknown = [name for name in reads if name not in RunConfig.model_fields]
    if unknown:
        raise ValueError(f"Unknown RunConfig fields: {unknown}")

    metadata: Dict[str, Any] = {"description": description, "reads": reads, "seeded": seeded}
    if row_schema:
        metadata["row_schema"] = row_schema.model_json_schema()
    if additional_info:
        metadata.update(additional_info)
    return metadata


def ignored_fields(config: RunConfig, metadata: Dict[str, Any]) -> List[str]:
    """Fields set explicitly on config that the experiment never reads."""
    return sorted(config.model_fields_set - RUN_FIELDS - set(metadata.get("reads", ())))
