"""Incremental (Bowyer-Watson) Delaunay triangulation in R^d and protection measurement."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from pdmesh.errors import DegenerateSimplexError, DelaunayError, DeskScaleLimitError
from pdmesh.utils.logging_utils import get_logger

from .geometry import circumspheres
from .mesh import DUPLICATE_TOLERANCE, PointSet, SimplicialMesh
from .predicates import in_sphere_sign, orientation

__all__ = [
    "MAX_DIM",
    "MAX_POINTS",
    "ProtectionReport",
    "delaunay_triangulate",
    "protection_report",
    "is_protected",
    "empty_sphere_violations",
]

_LOGGER = get_logger("Delaunay")

MAX_DIM = 5
MAX_POINTS = 5000

_GHOST = -1
_SPHERE_MARGIN = 1e-6
_MAX_FILTER_CONDITION = 1e8

Key = Tuple[int, ...]


class _Triangulation:
    """Cells of the triangulation of conv(S) closed off by ghost cells through a vertex at infinity."""

    def __init__(self, coords: np.ndarray) -> None:
        self.coords = coords
        self.dim = coords.shape[1]
        self.cells: Dict[int, Key] = {}
        self.facets: Dict[Key, List[int]] = defaultdict(list)
        self._spheres: Dict[int, Optional[Tuple[np.ndarray, float]]] = {}
        self._next_id = 0
        self._last: Optional[int] = None

    # -- bookkeeping -------------------------------------------------------

    def add_cell(self, vertices: Sequence[int]) -> int:
        cid = self._next_id
        self._next_id += 1
        key = tuple(sorted(vertices))
        self.cells[cid] = key
        for facet in combinations(key, self.dim):
            self.facets[facet].append(cid)
        if key[0] != _GHOST:
            self._spheres[cid] = self._sphere(key)
            self._last = cid
        return cid

    def remove_cell(self, cid: int) -> None:
        key = self.cells.pop(cid)
        for facet in combinations(key, self.dim):
            owners = self.facets[facet]
            owners.remove(cid)
            if not owners:
                del self.facets[facet]
        self._spheres.pop(cid, None)

    def _sphere(self, key: Key) -> Optional[Tuple[np.ndarray, float]]:
        verts = self.coords[list(key)]
        q = verts[1:] - verts[0]
        lhs = 2.0 * q
        try:
            if np.linalg.cond(lhs) > _MAX_FILTER_CONDITION:
                return None
            offset = np.linalg.solve(lhs, np.einsum("ij,ij->i", q, q))
        except np.linalg.LinAlgError:
            return None
        return verts[0] + offset, float(offset @ offset)

    # -- predicates --------------------------------------------------------

    def conflicts(self, cid: int, p: int) -> bool:
        key = self.cells[cid]
        point = self.coords[p]
        if key[0] == _GHOST:
            facet = key[1:]
            finite_id = next(owner for owner in self.facets[facet] if owner != cid)
            finite = self.cells[finite_id]
            side = orientation(self.coords[list(facet) + [p]])
            if side == 0:
                return in_sphere_sign(self.coords[list(finite)], point) > 0
            opposite = next(v for v in finite if v not in facet)
            return side != orientation(self.coords[list(facet) + [opposite]])
        cached = self._spheres.get(cid)
        if cached is not None:
            center, r2 = cached
            diff = point - center
            d2 = float(diff @ diff)
            if d2 < r2 * (1.0 - _SPHERE_MARGIN):
                return True
            if d2 > r2 * (1.0 + _SPHERE_MARGIN):
                return False
        return in_sphere_sign(self.coords[list(key)], point) > 0

    # -- insertion ---------------------------------------------------------

    def _walk(self, p: int) -> Optional[int]:
        """Visibility walk from the newest finite cell toward point *p*.

        Stops at the cell containing *p*, or at the ghost cell behind the hull
        facet that separates *p* from the triangulation. Returns None if the
        walk revisits a cell.
        """

        cid = self._last
        if cid is None or cid not in self.cells:
            return None
        visited = set()
        while cid not in visited:
            visited.add(cid)
            key = self.cells[cid]
            if key[0] == _GHOST:
                return cid
            step = None
            for facet in combinations(key, self.dim):
                opposite = next(v for v in key if v not in facet)
                side = orientation(self.coords[list(facet) + [p]])
                if side != 0 and side != orientation(self.coords[list(facet) + [opposite]]):
                    step = next(owner for owner in self.facets[facet] if owner != cid)
                    break
            if step is None:
                return cid
            cid = step
        return None

    def _first_conflict(self, p: int) -> Optional[int]:
        for cid in sorted(self.cells, reverse=True):
            if self.conflicts(cid, p):
                return cid
        return None

    def insert(self, p: int) -> None:
        start = self._walk(p)
        if start is None or not self.conflicts(start, p):
            start = self._first_conflict(p)
        if start is None:
            raise DelaunayError(f"point {p} conflicts with no cell")
        cavity = {start}
        rejected = set()
        stack = [start]
        while stack:
            cid = stack.pop()
            for facet in combinations(self.cells[cid], self.dim):
                for neighbour in self.facets[facet]:
                    if neighbour in cavity or neighbour in rejected:
                        continue
                    if self.conflicts(neighbour, p):
                        cavity.add(neighbour)
                        stack.append(neighbour)
                    else:
                        rejected.add(neighbour)

        counts = Counter(facet for cid in cavity for facet in combinations(self.cells[cid], self.dim))
        boundary = sorted(facet for facet, count in counts.items() if count == 1)
        for cid in sorted(cavity):
            self.remove_cell(cid)
        for facet in boundary:
            self.add_cell(facet + (p,))

    def finite_cells(self) -> List[Key]:
        return sorted(key for key in self.cells.values() if key[0] != _GHOST)


def _initial_simplex(coords: np.ndarray) -> List[int]:
    dim = coords.shape[1]
    chosen = [0]
    scale = float(np.max(np.abs(coords - coords[0]))) or 1.0
    for index in range(1, len(coords)):
        trial = coords[chosen[1:] + [index]] - coords[0]
        if np.linalg.matrix_rank(trial / scale, tol=1e-12) == len(chosen):
            chosen.append(index)
            if len(chosen) == dim + 1:
                return chosen
    raise DelaunayError("all points lie on a common hyperplane")


def delaunay_triangulate(ps: PointSet) -> SimplicialMesh:
    """Delaunay triangulation of conv(S) with vertex set exactly S.

    Points are inserted in input order after the first affinely independent
    d+1 of them. A co-spherical point is not in conflict with a cell, which
    makes the result deterministic for degenerate inputs.
    """

    coords = ps.coords
    dim, count = ps.dim, len(ps)
    if dim > MAX_DIM or count > MAX_POINTS:
        raise DeskScaleLimitError(f"desk-scale limits are d <= {MAX_DIM}, N <= {MAX_POINTS} (got d={dim}, N={count})")
    if count < dim + 1:
        raise DelaunayError(f"need at least {dim + 1} points in R^{dim}, got {count}")
    duplicates = ps.duplicate_pairs(DUPLICATE_TOLERANCE)
    if duplicates:
        a, b = duplicates[0]
        raise DelaunayError(f"duplicate points {a} and {b}")

    seed = _initial_simplex(coords)
    tri = _Triangulation(coords)
    tri.add_cell(seed)
    for facet in combinations(seed, dim):
        tri.add_cell(facet + (_GHOST,))

    seeded = set(seed)
    for index in range(count):
        if index not in seeded:
            tri.insert(index)

    cells = tri.finite_cells()
    _LOGGER.info("Delaunay triangulation: d=%d, %d points, %d cells", dim, count, len(cells))
    return SimplicialMesh(ps, np.asarray(cells, dtype=np.int64))


@dataclass(frozen=True)
class ProtectionReport:
    """Per-cell protection δ(K) = min over non-vertices q of |q - c_K| - R_K."""

    delta: float
    per_cell: Tuple[float, ...]
    witness: Tuple[int, ...]

    def normalized(self, h: float) -> float:
        return self.delta / h

    def to_dict(self) -> dict:
        return {"delta": self.delta, "per_cell": list(self.per_cell), "witness": list(self.witness)}


def protection_report(m: SimplicialMesh) -> ProtectionReport:
    """Protection of every cell against all points of the mesh that are not its vertices."""

    if m.n_cells == 0:
        raise DelaunayError("protection of an empty mesh")
    centers, radii = circumspheres(m.coords, m.cells)
    if not np.all(np.isfinite(radii)):
        bad = int(np.flatnonzero(~np.isfinite(radii))[0])
        raise DegenerateSimplexError(f"cell {bad} is degenerate; protection undefined")
    k = min(m.dim + 2, m.n_vertices)
    distances, indices = cKDTree(m.coords).query(centers, k=k)
    distances = np.asarray(distances).reshape(m.n_cells, k)
    indices = np.asarray(indices).reshape(m.n_cells, k)

    per_cell: List[float] = []
    witness: List[int] = []
    for cid, cell in enumerate(m.cells):
        members = set(int(v) for v in cell)
        value, hit = math.inf, -1
        for distance, index in zip(distances[cid], indices[cid]):
            if int(index) not in members and int(index) < m.n_vertices:
                value, hit = float(distance - radii[cid]), int(index)
                break
        per_cell.append(value)
        witness.append(hit)
    delta = min(per_cell)
    if delta < 0:
        _LOGGER.warning("Negative protection %.3e: the mesh is not Delaunay over its vertices", delta)
    return ProtectionReport(delta=delta, per_cell=tuple(per_cell), witness=tuple(witness))


def is_protected(m: SimplicialMesh, delta_min: float) -> Tuple[bool, ProtectionReport]:
    report = protection_report(m)
    return report.delta >= delta_min, report


def empty_sphere_violations(m: SimplicialMesh, *, chunk: int = 512) -> List[Tuple[int, int]]:
    """Brute-force check: (cell, point) pairs with the point strictly inside the cell's circumsphere.

    A float distance test with a relative band selects candidates; the exact
    predicate decides every candidate.
    """

    if m.n_cells == 0:
        return []
    centers, radii = circumspheres(m.coords, m.cells)
    violations: List[Tuple[int, int]] = []
    for start in range(0, m.n_cells, chunk):
        block = slice(start, start + chunk)
        gaps = np.linalg.norm(m.coords[None, :, :] - centers[block][:, None, :], axis=2)
        limit = radii[block][:, None] * (1.0 + 1e-9)
        suspects = np.argwhere(~(gaps > limit))
        for local, point in suspects:
            cid = start + int(local)
            cell = m.cells[cid]
            if int(point) in set(int(v) for v in cell):
                continue
            if in_sphere_sign(m.coords[cell], m.coords[int(point)]) > 0:
                violations.append((cid, int(point)))
    return violations
