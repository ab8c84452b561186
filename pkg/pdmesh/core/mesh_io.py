"""Text and JSON readers/writers for meshes and point files.

Text mesh::

    d N M
    x_1 ... x_d        (N lines)
    i_0 ... i_d        (M lines, 0-based)

Points file::

    d N
    x_1 ... x_d        (N lines)

Blank lines and lines starting with ``#`` are ignored. Writers emit 17
significant digits and LF line endings, so a written file re-reads to the
identical binary coordinates.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Iterator, List, Tuple, Union

import numpy as np

from pdmesh.errors import MeshError, MeshFormatError
from pdmesh.utils.logging_utils import get_logger
from pdmesh.utils.serialization import format_real

from .mesh import DUPLICATE_TOLERANCE, PointSet, SimplicialMesh

__all__ = [
    "FORMATS",
    "load_mesh",
    "save_mesh",
    "load_points",
    "save_points",
    "read_mesh",
    "write_mesh",
    "read_points",
    "format_for_path",
]

_LOGGER = get_logger("MeshIO")

FORMATS = ("text", "json")

Source = Union[bytes, str, IO[str], IO[bytes]]


def _read_text(source: Source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _content_lines(text: str) -> Iterator[Tuple[int, List[str]]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield number, stripped.split()


def _parse_ints(tokens: List[str], line: int, expected: int, what: str) -> List[int]:
    if len(tokens) != expected:
        raise MeshFormatError(f"{what}: expected {expected} integers, found {len(tokens)}", line=line)
    values = []
    for column, token in enumerate(tokens, start=1):
        try:
            values.append(int(token))
        except ValueError as exc:
            raise MeshFormatError(f"{what}: '{token}' is not an integer", line=line, column=column) from exc
    return values


def _parse_reals(tokens: List[str], line: int, expected: int) -> List[float]:
    if len(tokens) != expected:
        raise MeshFormatError(f"point: expected {expected} coordinates, found {len(tokens)}", line=line)
    values = []
    for column, token in enumerate(tokens, start=1):
        try:
            value = float(token)
        except ValueError as exc:
            raise MeshFormatError(f"point: '{token}' is not a real number", line=line, column=column) from exc
        if not np.isfinite(value):
            raise MeshFormatError("point: coordinates must be finite", line=line, column=column)
        values.append(value)
    return values


def _reject_duplicates(points: PointSet) -> None:
    pairs = points.duplicate_pairs(DUPLICATE_TOLERANCE)
    if pairs:
        a, b = pairs[0]
        raise MeshError(f"duplicate points {a} and {b} (distance < {DUPLICATE_TOLERANCE:g})")


def _parse_text_points(lines: Iterator[Tuple[int, List[str]]], dim: int, count: int) -> np.ndarray:
    coords = np.empty((count, dim))
    for row in range(count):
        try:
            number, tokens = next(lines)
        except StopIteration as exc:
            raise MeshFormatError(f"expected {count} points, file ended after {row}") from exc
        coords[row] = _parse_reals(tokens, number, dim)
    return coords


def _ensure_exhausted(lines: Iterator[Tuple[int, List[str]]]) -> None:
    extra = next(lines, None)
    if extra is not None:
        raise MeshFormatError("unexpected trailing content", line=extra[0])


def _load_text(text: str) -> SimplicialMesh:
    lines = _content_lines(text)
    try:
        number, tokens = next(lines)
    except StopIteration as exc:
        raise MeshFormatError("empty mesh file") from exc
    dim, count, n_cells = _parse_ints(tokens, number, 3, "header 'd N M'")
    if dim < 1 or count < 0 or n_cells < 0:
        raise MeshFormatError("header values must satisfy d >= 1, N >= 0, M >= 0", line=number)
    coords = _parse_text_points(lines, dim, count)
    cells = np.empty((n_cells, dim + 1), dtype=np.int64)
    for row in range(n_cells):
        try:
            number, tokens = next(lines)
        except StopIteration as exc:
            raise MeshFormatError(f"expected {n_cells} cells, file ended after {row}") from exc
        cells[row] = _parse_ints(tokens, number, dim + 1, "cell")
    _ensure_exhausted(lines)
    return _build(coords, cells)


def _load_json(text: str) -> SimplicialMesh:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MeshFormatError(f"malformed JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    if not isinstance(document, dict) or not {"dim", "points", "cells"} <= set(document):
        raise MeshFormatError("JSON mesh must be an object with 'dim', 'points' and 'cells'")
    dim = document["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise MeshFormatError("'dim' must be a positive integer")
    points = document["points"]
    cells = document["cells"]
    if not isinstance(points, list) or not isinstance(cells, list):
        raise MeshFormatError("'points' and 'cells' must be arrays")
    coords = np.empty((len(points), dim))
    for index, point in enumerate(points):
        if not isinstance(point, list) or len(point) != dim:
            raise MeshFormatError(f"point {index} must be an array of {dim} numbers")
        if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in point):
            raise MeshFormatError(f"point {index} has non-numeric coordinates")
        coords[index] = point
    table = np.empty((len(cells), dim + 1), dtype=np.int64)
    for index, cell in enumerate(cells):
        if not isinstance(cell, list) or len(cell) != dim + 1:
            raise MeshError(f"cell {index} must list {dim + 1} vertex indices")
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in cell):
            raise MeshFormatError(f"cell {index} has non-integer indices")
        table[index] = cell
    return _build(coords, table)


def _build(coords: np.ndarray, cells: np.ndarray) -> SimplicialMesh:
    points = PointSet(coords)
    _reject_duplicates(points)
    mesh = SimplicialMesh(points, cells)
    _LOGGER.debug("Loaded %r", mesh)
    return mesh


def load_mesh(source: Source, format: str = "text") -> SimplicialMesh:
    """Parse a mesh from bytes, text or a file object."""

    text = _read_text(source)
    if format == "text":
        return _load_text(text)
    if format == "json":
        return _load_json(text)
    raise ValueError(f"unknown mesh format '{format}' (expected one of {FORMATS})")


def save_mesh(m: SimplicialMesh, format: str = "text") -> bytes:
    """Canonical serialization of *m* (17 significant digits, LF endings)."""

    if format == "text":
        lines = [f"{m.dim} {m.n_vertices} {m.n_cells}"]
        lines.extend(" ".join(format_real(x) for x in point) for point in m.coords)
        lines.extend(" ".join(str(int(v)) for v in cell) for cell in m.cells)
        return ("\n".join(lines) + "\n").encode("utf-8")
    if format == "json":
        points = ",".join("[" + ",".join(format_real(x) for x in point) + "]" for point in m.coords)
        cells = ",".join("[" + ",".join(str(int(v)) for v in cell) + "]" for cell in m.cells)
        return f'{{"cells":[{cells}],"dim":{m.dim},"points":[{points}]}}\n'.encode("utf-8")
    raise ValueError(f"unknown mesh format '{format}' (expected one of {FORMATS})")


def load_points(source: Source) -> PointSet:
    """Parse a points file (``d N`` header, then N coordinate lines)."""

    lines = _content_lines(_read_text(source))
    try:
        number, tokens = next(lines)
    except StopIteration as exc:
        raise MeshFormatError("empty points file") from exc
    dim, count = _parse_ints(tokens, number, 2, "header 'd N'")
    if dim < 1 or count < 0:
        raise MeshFormatError("header values must satisfy d >= 1, N >= 0", line=number)
    coords = _parse_text_points(lines, dim, count)
    _ensure_exhausted(lines)
    return PointSet(coords)


def save_points(points: PointSet) -> bytes:
    lines = [f"{points.dim} {len(points)}"]
    lines.extend(" ".join(format_real(x) for x in point) for point in points.coords)
    return ("\n".join(lines) + "\n").encode("utf-8")


def format_for_path(path: Path | str) -> str:
    return "json" if Path(path).suffix.lower() == ".json" else "text"


def read_mesh(path: Path | str, format: str | None = None) -> SimplicialMesh:
    target = Path(path)
    return load_mesh(target.read_bytes(), format or format_for_path(target))


def write_mesh(m: SimplicialMesh, path: Path | str, format: str | None = None) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(save_mesh(m, format or format_for_path(target)))
    return target


def read_points(path: Path | str) -> PointSet:
    return load_points(Path(path).read_bytes())
