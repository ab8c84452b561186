"""Simplicial mesh data model, manifold validation and net parameters."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from pdmesh.errors import DimensionMismatchError, MeshError
from pdmesh.utils.logging_utils import get_logger

from .geometry import Simplex, affine_circumcenter, cell_volumes, circumspheres, is_degenerate

__all__ = [
    "PointSet",
    "SimplicialMesh",
    "NetParameters",
    "ManifoldReport",
    "build_facet_adjacency",
    "validate_manifold",
    "net_parameters",
    "covering_radius_monte_carlo",
    "locate_points",
    "DUPLICATE_TOLERANCE",
]

_LOGGER = get_logger("Mesh")

DUPLICATE_TOLERANCE = 1e-12

Facet = Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class PointSet:
    """Ordered vertex coordinates, one row per point."""

    coords: np.ndarray

    def __post_init__(self) -> None:
        if isinstance(self.coords, np.ndarray):
            arr = np.array(self.coords, dtype=float)
        else:
            rows = [list(map(float, row)) for row in self.coords]
            if len({len(row) for row in rows}) > 1:
                raise DimensionMismatchError("points have mixed dimensions")
            arr = np.array(rows, dtype=float)
        if arr.ndim != 2 or (arr.size and arr.shape[1] < 1):
            raise DimensionMismatchError("point coordinates must form an (N, d) array with d >= 1")
        if not np.all(np.isfinite(arr)):
            raise MeshError("point coordinates must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @property
    def dim(self) -> int:
        return int(self.coords.shape[1])

    def __len__(self) -> int:
        return int(self.coords.shape[0])

    def duplicate_pairs(self, tolerance: float = DUPLICATE_TOLERANCE) -> List[Tuple[int, int]]:
        """Index pairs of points closer than *tolerance*."""

        if len(self) < 2:
            return []
        return sorted(cKDTree(self.coords).query_pairs(tolerance))

    def min_separation(self) -> float:
        if len(self) < 2:
            raise MeshError("separation needs at least two points")
        distances, _ = cKDTree(self.coords).query(self.coords, k=2)
        return float(distances[:, 1].min())


def build_facet_adjacency(cells: np.ndarray) -> Dict[Facet, Tuple[int, ...]]:
    """Map each sorted facet (d-tuple of vertex indices) to its incident cells."""

    incident: Dict[Facet, List[int]] = defaultdict(list)
    for index, cell in enumerate(cells):
        ordered = sorted(int(v) for v in cell)
        for facet in combinations(ordered, len(ordered) - 1):
            incident[facet].append(index)
    return {facet: tuple(owners) for facet, owners in incident.items()}


class SimplicialMesh:
    """A point set plus (d+1)-tuples of 0-based vertex indices."""

    def __init__(self, points: PointSet | np.ndarray | Sequence[Sequence[float]], cells: Iterable[Sequence[int]] | np.ndarray) -> None:
        self._points = points if isinstance(points, PointSet) else PointSet(points)
        dim = self._points.dim
        arr = np.asarray(list(cells) if not isinstance(cells, np.ndarray) else cells)
        if arr.size == 0:
            arr = np.zeros((0, dim + 1), dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != dim + 1:
            raise MeshError(f"cells must have {dim + 1} vertex indices in R^{dim}")
        if not np.issubdtype(arr.dtype, np.integer):
            if not np.all(np.equal(np.mod(arr, 1), 0)):
                raise MeshError("cell indices must be integers")
        arr = arr.astype(np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= len(self._points)):
            bad = int(arr.max()) if arr.max() >= len(self._points) else int(arr.min())
            raise MeshError(f"cell references vertex {bad}, mesh has {len(self._points)} vertices")
        arr.setflags(write=False)
        self._cells = arr
        self._adjacency: Optional[Dict[Facet, Tuple[int, ...]]] = None

    # -- basic views -------------------------------------------------------

    @property
    def points(self) -> PointSet:
        return self._points

    @property
    def coords(self) -> np.ndarray:
        return self._points.coords

    @property
    def cells(self) -> np.ndarray:
        return self._cells

    @property
    def dim(self) -> int:
        return self._points.dim

    @property
    def n_vertices(self) -> int:
        return len(self._points)

    @property
    def n_cells(self) -> int:
        return int(self._cells.shape[0])

    @property
    def facet_adjacency(self) -> Mapping[Facet, Tuple[int, ...]]:
        if self._adjacency is None:
            self._adjacency = build_facet_adjacency(self._cells)
        return self._adjacency

    def simplex(self, index: int) -> Simplex:
        return Simplex(self.coords[self._cells[index]])

    def simplices(self) -> Iterator[Simplex]:
        for index in range(self.n_cells):
            yield self.simplex(index)

    def cell_coords(self) -> np.ndarray:
        """Vertex coordinates per cell, shape (M, d+1, d)."""

        return self.coords[self._cells]

    def volumes(self) -> np.ndarray:
        return cell_volumes(self.coords, self._cells)

    def boundary_facets(self) -> List[Facet]:
        return sorted(facet for facet, owners in self.facet_adjacency.items() if len(owners) == 1)

    def boundary_vertices(self) -> np.ndarray:
        marked = {v for facet in self.boundary_facets() for v in facet}
        return np.array(sorted(marked), dtype=np.int64)

    def interior_vertices(self) -> np.ndarray:
        used = np.unique(self._cells) if self.n_cells else np.zeros(0, dtype=np.int64)
        return np.setdiff1d(used, self.boundary_vertices())

    # -- derived meshes ----------------------------------------------------

    def transformed(self, matrix: np.ndarray, offset: Sequence[float] | None = None) -> "SimplicialMesh":
        moved = self.coords @ np.asarray(matrix, dtype=float).T
        if offset is not None:
            moved = moved + np.asarray(offset, dtype=float)
        return SimplicialMesh(PointSet(moved), self._cells)

    def scaled(self, factor: float) -> "SimplicialMesh":
        return SimplicialMesh(PointSet(self.coords * float(factor)), self._cells)

    def relabeled(self, permutation: Sequence[int]) -> "SimplicialMesh":
        """Reorder vertices so that new vertex ``i`` is old vertex ``permutation[i]``."""

        perm = np.asarray(permutation, dtype=np.int64)
        inverse = np.empty_like(perm)
        inverse[perm] = np.arange(len(perm))
        return SimplicialMesh(PointSet(self.coords[perm]), inverse[self._cells])

    def with_cells(self, cells: Iterable[Sequence[int]] | np.ndarray) -> "SimplicialMesh":
        return SimplicialMesh(self._points, cells)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimplicialMesh):
            return NotImplemented
        return (
            self.coords.shape == other.coords.shape
            and bool(np.array_equal(self.coords, other.coords))
            and bool(np.array_equal(self._cells, other._cells))
        )

    def __repr__(self) -> str:
        return f"SimplicialMesh(dim={self.dim}, n_vertices={self.n_vertices}, n_cells={self.n_cells})"


@dataclass(frozen=True)
class ManifoldReport:
    bad_facets: Tuple[Tuple[Facet, int], ...]
    duplicate_cells: Tuple[Tuple[int, ...], ...]
    degenerate_cells: Tuple[int, ...]
    n_components: int
    n_cells: int

    @property
    def connected(self) -> bool:
        return self.n_components == 1

    @property
    def passed(self) -> bool:
        return (
            self.n_cells > 0
            and not self.bad_facets
            and not self.duplicate_cells
            and not self.degenerate_cells
            and self.connected
        )

    def to_dict(self) -> dict:
        return {
            "bad_facets": [{"facet": list(facet), "cofaces": count} for facet, count in self.bad_facets],
            "duplicate_cells": [list(cell) for cell in self.duplicate_cells],
            "degenerate_cells": list(self.degenerate_cells),
            "n_components": self.n_components,
            "connected": self.connected,
            "pass": self.passed,
        }


def validate_manifold(m: SimplicialMesh) -> ManifoldReport:
    """Check facet cofaces, duplicates, degeneracy and d-connectivity."""

    adjacency = m.facet_adjacency
    bad = tuple(
        (facet, len(owners)) for facet, owners in sorted(adjacency.items()) if len(owners) not in (1, 2)
    )
    keys = Counter(tuple(sorted(int(v) for v in cell)) for cell in m.cells)
    duplicates = tuple(sorted(key for key, count in keys.items() if count > 1))
    degenerate = tuple(index for index in range(m.n_cells) if is_degenerate(m.simplex(index)))

    n_components = 0
    if m.n_cells:
        rows: List[int] = []
        cols: List[int] = []
        for owners in adjacency.values():
            for a, b in combinations(owners, 2):
                rows.extend((a, b))
                cols.extend((b, a))
        graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(m.n_cells, m.n_cells)).tocsr()
        n_components, _ = connected_components(graph, directed=False)

    report = ManifoldReport(
        bad_facets=bad,
        duplicate_cells=duplicates,
        degenerate_cells=degenerate,
        n_components=int(n_components),
        n_cells=m.n_cells,
    )
    if not report.passed:
        _LOGGER.info(
            "Manifold check failed: %d bad facets, %d duplicates, %d degenerate, %d components",
            len(bad),
            len(duplicates),
            len(degenerate),
            report.n_components,
        )
    return report


@dataclass(frozen=True)
class NetParameters:
    epsilon: float
    eta: float
    eta_bar: float = field(init=False)

    def __post_init__(self) -> None:
        if not (self.epsilon > 0.0 and self.eta > 0.0):
            raise MeshError(f"net parameters must be positive (epsilon={self.epsilon}, eta={self.eta})")
        object.__setattr__(self, "eta_bar", self.eta / self.epsilon)

    def to_dict(self) -> dict:
        return {"epsilon": self.epsilon, "eta": self.eta, "eta_bar": self.eta_bar}


def locate_points(m: SimplicialMesh, queries: np.ndarray, *, tolerance: float = 1e-10, chunk: int = 256) -> np.ndarray:
    """Index of a cell containing each query point (closed cells), or -1."""

    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    found = np.full(len(queries), -1, dtype=np.int64)
    if m.n_cells == 0 or len(queries) == 0:
        return found
    verts = m.cell_coords()
    origin = verts[:, 0, :]
    q = verts[:, 1:, :] - origin[:, None, :]
    good = ~np.array([is_degenerate(m.simplex(i)) for i in range(m.n_cells)])
    inverse = np.zeros_like(q)
    inverse[good] = np.linalg.inv(q[good])
    for start in range(0, len(queries), chunk):
        block = queries[start : start + chunk]
        rel = block[:, None, :] - origin[None, :, :]
        lam = np.einsum("pmd,mde->pme", rel, inverse)
        lam0 = 1.0 - lam.sum(axis=2)
        inside = (lam.min(axis=2) >= -tolerance) & (lam0 >= -tolerance) & good[None, :]
        hit = inside.any(axis=1)
        found[start : start + chunk][hit] = inside[hit].argmax(axis=1)
    return found


def _boundary_candidates(m: SimplicialMesh) -> np.ndarray:
    """Circumcentres of boundary faces (restricted to their affine hull) that lie in the face."""

    candidates: List[np.ndarray] = []
    seen = set()
    for facet in m.boundary_facets():
        for size in range(2, len(facet) + 1):
            for face in combinations(facet, size):
                if face in seen:
                    continue
                seen.add(face)
                pts = m.coords[list(face)]
                center, weights = affine_circumcenter(pts)
                if weights is not None and weights.min() >= -1e-12:
                    candidates.append(center)
    if not candidates:
        return np.zeros((0, m.dim))
    return np.asarray(candidates)


def covering_radius_monte_carlo(m: SimplicialMesh, *, samples: int = 100_000, seed: int = 0) -> float:
    """Largest nearest-vertex distance over uniform samples of the meshed domain."""

    if m.n_cells == 0:
        raise MeshError("covering radius of an empty mesh")
    rng = np.random.default_rng(seed)
    volumes = m.volumes()
    probabilities = volumes / volumes.sum()
    chosen = rng.choice(m.n_cells, size=samples, p=probabilities)
    weights = rng.dirichlet(np.ones(m.dim + 1), size=samples)
    sample_points = np.einsum("sk,skd->sd", weights, m.cell_coords()[chosen])
    distances, _ = cKDTree(m.coords).query(sample_points)
    return float(distances.max())


def net_parameters(
    ps: PointSet,
    hull_mesh: SimplicialMesh,
    *,
    monte_carlo_samples: int = 0,
    seed: int = 0,
) -> NetParameters:
    """Separation eta (exact) and covering radius epsilon over the meshed domain."""

    if len(ps) < 2:
        raise MeshError("net parameters need at least two points")
    eta = ps.min_separation()
    tree = cKDTree(ps.coords)

    centers, _ = circumspheres(hull_mesh.coords, hull_mesh.cells)
    centers = centers[np.all(np.isfinite(centers), axis=1)]
    interior = centers[locate_points(hull_mesh, centers) >= 0] if len(centers) else centers
    candidates = np.vstack([interior, _boundary_candidates(hull_mesh)])
    epsilon = float(tree.query(candidates)[0].max()) if len(candidates) else 0.0

    if monte_carlo_samples > 0 or epsilon <= 0.0:
        sampled = covering_radius_monte_carlo(hull_mesh, samples=max(monte_carlo_samples, 10_000), seed=seed)
        if epsilon > 0.0 and abs(sampled - epsilon) > 0.05 * epsilon:
            _LOGGER.warning(
                "Monte-Carlo covering radius %.6g differs from candidate radius %.6g by more than 5%%",
                sampled,
                epsilon,
            )
        epsilon = max(epsilon, sampled)

    return NetParameters(epsilon=epsilon, eta=eta)
