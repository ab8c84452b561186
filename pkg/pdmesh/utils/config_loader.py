"""YAML/JSON configuration loading and schema validation."""

from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml
from jsonschema import Draft7Validator

from .logging_utils import get_logger

__all__ = ["ConfigError", "load_config", "validate_config", "SCHEMA_DIR", "CONFIG_DIR"]

_LOGGER = get_logger("Config")

SCHEMA_DIR = Path(__file__).resolve().parents[1] / "specs"
CONFIG_DIR = Path(__file__).resolve().parents[1] / "config"


class ConfigError(RuntimeError):
    """Raised when configuration documents are missing or malformed."""


def load_config(path: str | Path) -> Dict[str, Any]:
    """Load a YAML (or JSON) configuration file and return its mapping."""

    config_path = Path(path)
    if not config_path.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    with config_path.open("r", encoding="utf-8") as handle:
        try:
            data = yaml.safe_load(handle) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"Failed to parse config: {config_path}") from exc

    if not isinstance(data, dict):
        raise ConfigError("Configuration document must be a mapping at the top level.")

    _LOGGER.debug("Loaded configuration %s (%d keys)", config_path, len(data))
    return data


def validate_config(document: Mapping[str, Any], schema_name: str) -> Dict[str, Any]:
    """Validate *document* against ``specs/<schema_name>.json``; return a plain dict copy."""

    validator = _load_validator(schema_name)
    errors = sorted(validator.iter_errors(dict(document)), key=lambda err: list(err.absolute_path))
    if errors:
        first = errors[0]
        where = "/".join(str(part) for part in first.absolute_path) or "<root>"
        raise ConfigError(f"Invalid configuration at {where}: {first.message}")
    return dict(document)


@lru_cache(maxsize=8)
def _load_validator(schema_name: str, schema_dir: Optional[str] = None) -> Draft7Validator:
    base = Path(schema_dir) if schema_dir is not None else SCHEMA_DIR
    schema_file = base / f"{schema_name}.json"
    if not schema_file.exists():
        raise FileNotFoundError(f"Schema not found: {schema_file}")
    with schema_file.open("r", encoding="utf-8") as handle:
        schema = json.load(handle)
    Draft7Validator.check_schema(schema)
    return Draft7Validator(schema)
