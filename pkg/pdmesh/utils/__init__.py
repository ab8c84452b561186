"""Utilities package exports."""

from .config_loader import CONFIG_DIR, SCHEMA_DIR, ConfigError, load_config, validate_config
from .logging_utils import get_logger, set_level
from .parallel import parallel_map, worker_count
from .reports import load_json_report, rows_to_csv, with_checksum, write_csv, write_json_report
from .serialization import (
    SerializationError,
    format_real,
    from_json,
    generate_checksum,
    to_json,
    to_serializable,
)

__all__ = [
    "CONFIG_DIR",
    "SCHEMA_DIR",
    "ConfigError",
    "format_real",
    "from_json",
    "generate_checksum",
    "get_logger",
    "load_config",
    "load_json_report",
    "parallel_map",
    "rows_to_csv",
    "SerializationError",
    "set_level",
    "to_json",
    "to_serializable",
    "validate_config",
    "with_checksum",
    "worker_count",
    "write_csv",
    "write_json_report",
]
