"""Writers for JSON reports and plot-ready CSV tables."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

from .logging_utils import get_logger
from .serialization import format_real, from_json, generate_checksum, to_json, to_serializable

__all__ = [
    "rows_to_csv",
    "write_csv",
    "write_json_report",
    "load_json_report",
    "with_checksum",
]

_LOGGER = get_logger("Reports")


def with_checksum(payload: Mapping[str, Any]) -> Dict[str, Any]:
    """Return a copy of *payload* carrying the checksum of its other fields."""

    body = {key: value for key, value in payload.items() if key != "checksum"}
    encoded = to_serializable(body)
    encoded["checksum"] = generate_checksum(encoded)
    return encoded


def write_json_report(payload: Mapping[str, Any], path: Path | str, *, pretty: bool = True) -> Path:
    """Write *payload* as canonical JSON (LF endings) and return the path."""

    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    text = to_json(payload, pretty=pretty) + "\n"
    with target.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
    _LOGGER.info("Wrote JSON report to %s", target)
    return target


def load_json_report(path: Path | str) -> Any:
    """Read a report written by :func:`write_json_report`."""

    target = Path(path)
    if not target.exists():
        raise FileNotFoundError(f"Report not found: {target}")
    return from_json(target.read_text(encoding="utf-8"))


def rows_to_csv(rows: Iterable[Mapping[str, Any]], columns: Optional[Sequence[str]] = None) -> str:
    """Render *rows* as CSV text; floats use 17 significant digits."""

    materialised: List[Mapping[str, Any]] = list(rows)
    if columns is None:
        seen: Dict[str, None] = {}
        for row in materialised:
            for key in row:
                seen.setdefault(str(key), None)
        columns = list(seen)

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in materialised:
        writer.writerow([_cell(row.get(column)) for column in columns])
    return buffer.getvalue()


def write_csv(rows: Iterable[Mapping[str, Any]], path: Path | str, columns: Optional[Sequence[str]] = None) -> Path:
    """Write *rows* to *path* as CSV and return the path."""

    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write(rows_to_csv(rows, columns))
    _LOGGER.info("Wrote CSV table to %s", target)
    return target


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_real(value)
    if isinstance(value, (list, tuple)):
        return " ".join(_cell(item) for item in value)
    serial = to_serializable(value)
    if isinstance(serial, float):
        return format_real(serial)
    return str(serial)
