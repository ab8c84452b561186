"""Canonical JSON encoding, checksums and fixed-precision number formatting."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .logging_utils import get_logger

__all__ = [
    "SerializationError",
    "to_json",
    "from_json",
    "to_serializable",
    "generate_checksum",
    "format_real",
]

_LOGGER = get_logger("Serialization")

_NON_FINITE = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


class SerializationError(RuntimeError):
    """Raised when serialization or deserialization fails."""


def format_real(value: float) -> str:
    """Return *value* in 17-significant-digit scientific notation."""

    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.16e}"


def to_json(obj: Any, *, pretty: bool = False) -> str:
    """Return canonical JSON for *obj* (sorted keys, fixed separators)."""

    payload = to_serializable(obj)
    indent = 2 if pretty else None
    separators = (",", ": ") if pretty else (",", ":")
    try:
        return json.dumps(payload, indent=indent, sort_keys=True, separators=separators, allow_nan=False)
    except (TypeError, ValueError) as exc:
        raise SerializationError(f"JSON encoding failed: {exc}") from exc


def from_json(data: str | bytes | bytearray) -> Any:
    """Parse JSON produced by :func:`to_json`, restoring non-finite floats."""

    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SerializationError(f"Malformed JSON: {exc}") from exc
    return _decode(payload)


def generate_checksum(obj: Any, *, algorithm: str = "sha256") -> str:
    """Return a hexadecimal digest of the canonical encoding of *obj*."""

    try:
        hasher = hashlib.new(algorithm)
    except ValueError as exc:
        raise SerializationError(f"Unsupported hash algorithm '{algorithm}'") from exc

    if isinstance(obj, bytes):
        payload = obj
    elif isinstance(obj, str):
        payload = obj.encode("utf-8")
    else:
        payload = to_json(obj).encode("utf-8")
    hasher.update(payload)
    return hasher.hexdigest()


def to_serializable(obj: Any) -> Any:
    """Convert *obj* into plain JSON-compatible Python values."""

    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isfinite(value):
            return value
        return format_real(value)
    if isinstance(obj, np.ndarray):
        return [to_serializable(item) for item in obj.tolist()]
    if isinstance(obj, Mapping):
        return {str(key): to_serializable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_serializable(item) for item in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted((to_serializable(item) for item in obj), key=str)
    if isinstance(obj, Path):
        return str(obj)
    if hasattr(obj, "to_dict"):
        return to_serializable(obj.to_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return to_serializable({field.name: getattr(obj, field.name) for field in dataclasses.fields(obj)})

    _LOGGER.debug("Falling back to str() for %s", type(obj).__name__)
    return str(obj)


def _decode(obj: Any) -> Any:
    if isinstance(obj, str) and obj in _NON_FINITE:
        return _NON_FINITE[obj]
    if isinstance(obj, list):
        return [_decode(item) for item in obj]
    if isinstance(obj, dict):
        return {key: _decode(value) for key, value in obj.items()}
    return obj
