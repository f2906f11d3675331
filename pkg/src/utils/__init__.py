"""Utility functions and helpers."""

from .errors import (
    ArtifactError,
    ConfigError,
    DivergenceError,
    NumericalError,
    ScboError,
    UnknownObjectiveError,
)
from .helpers import derive_seed, format_output, get_timestamp, load_yaml, validate_config

__all__ = [
    "ArtifactError",
    "ConfigError",
    "DivergenceError",
    "NumericalError",
    "ScboError",
    "UnknownObjectiveError",
    "derive_seed",
    "format_output",
    "get_timestamp",
    "load_yaml",
    "validate_config",
]
