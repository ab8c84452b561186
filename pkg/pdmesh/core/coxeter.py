"""Coxeter triangulations of type Ã_d clipped to an axis-aligned box.

The Freudenthal-Kuhn triangulation of Z^d (cells ``z, z+e_π1, z+e_π1+e_π2, ...``
for every permutation π) is mapped by the symmetric square root of the Gram
matrix ``(d+1) I - J``. Under that map every Kuhn cell becomes the same Ã_d
simplex; the shortest edge is normalised to ``scale``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product
from typing import Dict, List, Sequence, Tuple

import numpy as np

from pdmesh.errors import CoxeterError, DeskScaleLimitError
from pdmesh.utils.logging_utils import get_logger

from .delaunay import MAX_DIM, protection_report
from .mesh import PointSet, SimplicialMesh

__all__ = [
    "CoxeterSpec",
    "lattice_map",
    "kuhn_offsets",
    "longest_edge_factor",
    "generate_coxeter",
    "coxeter_protection_trend",
    "MAX_CANDIDATE_CELLS",
]

_LOGGER = get_logger("Coxeter")

MAX_CANDIDATE_CELLS = 2_000_000
_BOX_TOLERANCE = 1e-9


@dataclass(frozen=True)
class CoxeterSpec:
    dim: int
    scale: float
    box: Tuple[Tuple[float, float], ...]

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise CoxeterError(f"Coxeter triangulations need d >= 2, got {self.dim}")
        if not self.scale > 0.0:
            raise CoxeterError(f"scale must be positive, got {self.scale}")
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        if len(box) != self.dim:
            raise CoxeterError(f"box needs {self.dim} (lo, hi) pairs, got {len(box)}")
        for axis, (lo, hi) in enumerate(box):
            if not lo < hi:
                raise CoxeterError(f"box axis {axis}: lo={lo} must be below hi={hi}")
        object.__setattr__(self, "box", box)

    @classmethod
    def cube(cls, dim: int, side: float, *, scale: float = 1.0) -> "CoxeterSpec":
        return cls(dim=dim, scale=scale, box=tuple((0.0, float(side)) for _ in range(dim)))

    def to_dict(self) -> dict:
        return {"dim": self.dim, "scale": self.scale, "box": [list(pair) for pair in self.box]}


def lattice_map(dim: int, scale: float = 1.0) -> np.ndarray:
    """Matrix sending the integer lattice to the Ã_d vertex lattice."""

    root = math.sqrt(dim + 1)
    ones = np.ones((dim, dim))
    return scale * (root * np.eye(dim) + (1.0 - root) * ones / dim) / math.sqrt(dim)


@lru_cache(maxsize=None)
def kuhn_offsets(dim: int) -> np.ndarray:
    """Integer vertex offsets of all d! Kuhn cells, shape (d!, d+1, d)."""

    eye = np.eye(dim, dtype=np.int64)
    cells = []
    for perm in permutations(range(dim)):
        steps = eye[list(perm)]
        cells.append(np.vstack([np.zeros((1, dim), dtype=np.int64), np.cumsum(steps, axis=0)]))
    table = np.asarray(cells)
    table.setflags(write=False)
    return table


def longest_edge_factor(dim: int) -> float:
    """Longest Ã_d edge relative to the shortest one."""

    k = (dim + 1) // 2
    return math.sqrt(k * (dim + 1 - k) / dim)


def _lattice_patch(matrix: np.ndarray, zmin: np.ndarray, zmax: np.ndarray) -> Tuple[np.ndarray, np.ndarray, Tuple[int, ...]]:
    shape = tuple(int(n) for n in zmax - zmin + 1)
    grid = np.indices(shape).reshape(len(shape), -1).T + zmin
    return grid, grid @ matrix.T, shape


def generate_coxeter(spec: CoxeterSpec) -> SimplicialMesh:
    """Ã_d cells whose vertices all lie in the closed box, with unused lattice points dropped."""

    dim = spec.dim
    matrix = lattice_map(dim, spec.scale)
    lo = np.array([pair[0] for pair in spec.box])
    hi = np.array([pair[1] for pair in spec.box])
    corners = np.array(list(product(*spec.box)))
    lattice_corners = corners @ np.linalg.inv(matrix).T
    zmin = np.floor(lattice_corners.min(axis=0)).astype(np.int64) - 1
    zmax = np.ceil(lattice_corners.max(axis=0)).astype(np.int64) + 1

    offsets = kuhn_offsets(dim)
    n_bases = int(np.prod(zmax - zmin))
    if n_bases * len(offsets) > MAX_CANDIDATE_CELLS:
        raise DeskScaleLimitError(
            f"box spans {n_bases * len(offsets)} candidate cells (limit {MAX_CANDIDATE_CELLS}); shrink it or raise scale"
        )

    grid, coords, shape = _lattice_patch(matrix, zmin, zmax)
    tolerance = _BOX_TOLERANCE * max(spec.scale, float(np.max(np.abs(hi - lo))))
    inside = np.all((coords >= lo - tolerance) & (coords <= hi + tolerance), axis=1)
    slot = np.full(len(grid), -1, dtype=np.int64)
    slot[inside] = np.arange(int(inside.sum()))

    bases = grid[np.all(grid < zmax, axis=1)]
    blocks: List[np.ndarray] = []
    for offset in offsets:
        verts = bases[:, None, :] + offset[None, :, :]
        flat = np.ravel_multi_index(tuple(np.moveaxis(verts - zmin, -1, 0)), shape)
        ids = slot[flat]
        blocks.append(ids[np.all(ids >= 0, axis=1)])
    cells = np.vstack(blocks) if blocks else np.zeros((0, dim + 1), dtype=np.int64)
    if len(cells) == 0:
        raise CoxeterError(f"box {spec.box} holds no complete lattice cell at scale {spec.scale}")

    used = np.unique(cells)
    renumber = np.full(int(inside.sum()), -1, dtype=np.int64)
    renumber[used] = np.arange(len(used))
    cells = np.unique(np.sort(renumber[cells], axis=1), axis=0)
    points = coords[inside][used]
    _LOGGER.info("Coxeter mesh: d=%d, %d vertices, %d cells", dim, len(points), len(cells))
    return SimplicialMesh(PointSet(points), cells)


def _central_patch(dim: int, scale: float) -> SimplicialMesh:
    """The d! cells at the lattice origin together with every lattice point near their circumspheres."""

    matrix = lattice_map(dim, scale)
    radius_bound = scale * math.sqrt((dim + 2) / 12.0) * longest_edge_factor(dim)
    # the smallest singular value of the lattice map is scale / sqrt(d)
    reach = int(math.ceil(2.0 * radius_bound * math.sqrt(dim) / scale)) + 1
    zmin = np.full(dim, -reach, dtype=np.int64)
    zmax = np.full(dim, reach + 1, dtype=np.int64)
    grid, coords, shape = _lattice_patch(matrix, zmin, zmax)
    offsets = kuhn_offsets(dim)
    cells = np.ravel_multi_index(tuple(np.moveaxis(offsets - zmin, -1, 0)), shape)
    return SimplicialMesh(PointSet(coords), np.sort(cells, axis=1))


def coxeter_protection_trend(d_range: Sequence[int], scale: float = 1.0) -> List[Dict[str, float]]:
    """Normalised protection δ/h of the Ã_d triangulation for each dimension in *d_range*."""

    rows: List[Dict[str, float]] = []
    for dim in d_range:
        dim = int(dim)
        if dim < 2:
            raise CoxeterError(f"Coxeter triangulations need d >= 2, got {dim}")
        if dim > MAX_DIM:
            raise DeskScaleLimitError(f"protection trend is limited to d <= {MAX_DIM}")
        patch = _central_patch(dim, scale)
        delta = protection_report(patch).delta
        h = scale * longest_edge_factor(dim)
        rows.append({"d": dim, "delta": delta, "h": h, "delta_over_h": delta / h})
        _LOGGER.debug("Coxeter d=%d: delta=%.6g h=%.6g", dim, delta, h)
    return rows
