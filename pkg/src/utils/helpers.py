"""Helper utility functions."""

import hashlib
import json
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import yaml

from .errors import ConfigError


SCHEMA_VERSION = 1


def load_yaml(config_path: Optional[str] = None, config_dict: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """
    Load a YAML document from a file or take it from a dictionary.

    Args:
        config_path: Path to a YAML file
        config_dict: Already parsed document (wins over config_path)

    Returns:
        Parsed document (empty dict for an empty file)
    """
    if config_dict is not None:
        return config_dict

    if config_path is None:
        return {}

    config_file = Path(config_path)
    if not config_file.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    with open(config_file, "r", encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"Cannot parse {config_path}: {e}") from e

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{config_path}: top level must be a mapping")
    return data


def validate_config(config: Dict[str, Any]) -> bool:
    """
    Validate the envelope of an experiment document.

    Args:
        config: Parsed experiment document

    Returns:
        True if valid, raises ConfigError otherwise
    """
    required_keys = ["schema_version"]

    for key in required_keys:
        if key not in config:
            raise ConfigError(f"Missing required configuration key: {key}")

    if config["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(
            f"Unsupported schema_version {config['schema_version']!r} (expected {SCHEMA_VERSION})"
        )

    return True


def _json_default(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    return str(value)


def format_output(data: Any, format_type: str = "json") -> str:
    """
    Format output data.

    Args:
        data: Data to format
        format_type: Output format ("json" or "string")

    Returns:
        Formatted string
    """
    if format_type == "json":
        return json.dumps(data, indent=2, default=_json_default)
    return str(data)


def get_timestamp(format_str: str = "%Y-%m-%d %H:%M:%S") -> str:
    """
    Get current timestamp as formatted string.

    Args:
        format_str: Timestamp format string

    Returns:
        Formatted timestamp string
    """
    return datetime.now().strftime(format_str)


def derive_seed(*parts: Any) -> int:
    """
    Derive a 63-bit seed from an ordered tuple of values.

    The hash only depends on the textual form of the parts, so adding
    cells to a table never changes the seeds of existing cells.
    """
    key = "|".join(repr(p) for p in parts).encode("utf-8")
    digest = hashlib.blake2b(key, digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1
