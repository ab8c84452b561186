"""Primitives on a single d-simplex: volumes, altitudes, spheres and balls."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import pdist

from pdmesh.errors import (
    DegenerateFacetError,
    DegenerateSimplexError,
    DimensionMismatchError,
    GeometryError,
)
from pdmesh.utils.logging_utils import get_logger

__all__ = [
    "Ball",
    "Simplex",
    "edge_pairs",
    "edge_vectors",
    "simplex_volume",
    "facet_volumes",
    "altitudes",
    "thickness",
    "is_degenerate",
    "circumsphere",
    "insphere_diameter",
    "min_containment_ball",
    "smallest_enclosing_ball",
    "enclosing_ball_brute_force",
    "diameter",
    "cell_volumes",
    "circumspheres",
    "affine_circumcenter",
    "DEGENERATE_THICKNESS",
    "DEGENERATE_VOLUME",
]

_LOGGER = get_logger("Geometry")

DEGENERATE_THICKNESS = 1e-13
DEGENERATE_VOLUME = 1e-300
_BALL_SLACK = 1e-12


def _as_vertex_array(points: Iterable[Sequence[float]] | np.ndarray) -> np.ndarray:
    if isinstance(points, np.ndarray):
        arr = np.array(points, dtype=float)
    else:
        rows = [list(map(float, point)) for point in points]
        lengths = {len(row) for row in rows}
        if len(lengths) > 1:
            raise DimensionMismatchError(f"vertices have mixed dimensions {sorted(lengths)}")
        arr = np.array(rows, dtype=float)
    if arr.ndim != 2:
        raise DimensionMismatchError("vertices must form a two-dimensional array (n_points, dim)")
    if not np.all(np.isfinite(arr)):
        raise GeometryError("vertex coordinates must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class Ball:
    """Closed ball; ``condition`` is set when the centre came from a linear solve."""

    center: np.ndarray
    radius: float
    condition: Optional[float] = None

    def contains(self, point: Sequence[float], *, slack: float = _BALL_SLACK) -> bool:
        distance = float(np.linalg.norm(np.asarray(point, dtype=float) - self.center))
        return distance <= self.radius * (1.0 + slack) + DEGENERATE_VOLUME

    def to_dict(self) -> dict:
        payload = {"center": self.center.tolist(), "radius": float(self.radius)}
        if self.condition is not None:
            payload["condition"] = float(self.condition)
        return payload


@dataclass(frozen=True, eq=False)
class Simplex:
    """A d-simplex given by its d+1 vertices in R^d (rows of ``vertices``)."""

    vertices: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_vertex_array(self.vertices)
        count, dim = arr.shape
        if dim < 1:
            raise GeometryError("ambient dimension must be at least 1")
        if count != dim + 1:
            raise GeometryError(f"a simplex in R^{dim} needs {dim + 1} vertices, got {count}")
        arr.setflags(write=False)
        object.__setattr__(self, "vertices", arr)

    @classmethod
    def from_points(cls, points: Iterable[Sequence[float]]) -> "Simplex":
        return cls(_as_vertex_array(points))

    @property
    def dim(self) -> int:
        return int(self.vertices.shape[1])

    def transformed(self, matrix: np.ndarray, offset: Sequence[float] | None = None) -> "Simplex":
        moved = self.vertices @ np.asarray(matrix, dtype=float).T
        if offset is not None:
            moved = moved + np.asarray(offset, dtype=float)
        return Simplex(moved)


@lru_cache(maxsize=None)
def edge_pairs(dim: int) -> Tuple[Tuple[int, int], ...]:
    """Vertex index pairs (i, j), i < j, of the d(d+1)/2 edges of a d-simplex."""

    return tuple(combinations(range(dim + 1), 2))


def edge_vectors(s: Simplex) -> np.ndarray:
    """Edge vectors p_j - p_i for every pair returned by :func:`edge_pairs`."""

    pairs = np.asarray(edge_pairs(s.dim), dtype=int)
    return s.vertices[pairs[:, 1]] - s.vertices[pairs[:, 0]]


def simplex_volume(s: Simplex) -> float:
    """|K| = |det(p_1 - p_0, ..., p_d - p_0)| / d!."""

    q = s.vertices[1:] - s.vertices[0]
    return abs(float(np.linalg.det(q))) / math.factorial(s.dim)


def facet_volumes(s: Simplex) -> np.ndarray:
    """(d-1)-volume of the facet opposite each vertex, via Gram determinants."""

    dim = s.dim
    volumes = np.empty(dim + 1)
    if dim == 1:
        volumes.fill(1.0)
        return volumes
    scale = math.factorial(dim - 1)
    for r in range(dim + 1):
        facet = np.delete(s.vertices, r, axis=0)
        edges = facet[1:] - facet[0]
        gram = edges @ edges.T
        volumes[r] = math.sqrt(max(float(np.linalg.det(gram)), 0.0)) / scale
    return volumes


def altitudes(s: Simplex) -> np.ndarray:
    """Distance from each vertex to the affine hull of its opposite facet."""

    facets = facet_volumes(s)
    bad = np.flatnonzero(facets <= DEGENERATE_VOLUME)
    if bad.size:
        raise DegenerateFacetError(f"facets {bad.tolist()} have zero (d-1)-volume")
    return s.dim * simplex_volume(s) / facets


def thickness(s: Simplex) -> float:
    """Minimum altitude over d times the diameter; 0 for void simplices."""

    longest = diameter(s)
    if longest <= 0.0:
        return 0.0
    try:
        heights = altitudes(s)
    except DegenerateFacetError:
        return 0.0
    return float(heights.min()) / (s.dim * longest)


def is_degenerate(s: Simplex) -> bool:
    return simplex_volume(s) < DEGENERATE_VOLUME or thickness(s) < DEGENERATE_THICKNESS


def circumsphere(s: Simplex) -> Ball:
    """Ball through all d+1 vertices, from the bisector equations."""

    if is_degenerate(s):
        raise DegenerateSimplexError("degenerate simplex has no finite circumsphere")
    origin = s.vertices[0]
    q = s.vertices[1:] - origin
    lhs = 2.0 * q
    rhs = np.einsum("ij,ij->i", q, q)
    offset = np.linalg.solve(lhs, rhs)
    condition = float(np.linalg.cond(lhs))
    if condition > 1e12:
        _LOGGER.debug("circumsphere system is ill-conditioned (cond=%.3e)", condition)
    return Ball(center=origin + offset, radius=float(np.linalg.norm(offset)), condition=condition)


def insphere_diameter(s: Simplex) -> float:
    """rho(K) = 2 d |K| / sum of facet volumes; 0 for degenerate simplices."""

    volume = simplex_volume(s)
    if volume < DEGENERATE_VOLUME:
        return 0.0
    total = float(facet_volumes(s).sum())
    if total <= 0.0:
        return 0.0
    return 2.0 * s.dim * volume / total


def diameter(s: Simplex) -> float:
    """Longest edge length."""

    return _point_diameter(s.vertices)


def _point_diameter(points: np.ndarray) -> float:
    if len(points) < 2:
        return 0.0
    return float(pdist(points).max())


# ---------------------------------------------------------------------------
# Smallest enclosing ball


def _ball_through(points: np.ndarray) -> Tuple[np.ndarray, float]:
    """Smallest ball with every row of *points* on its boundary (centre in their affine hull)."""

    if len(points) == 1:
        return points[0].copy(), 0.0
    origin = points[0]
    q = points[1:] - origin
    gram = q @ q.T
    rhs = 0.5 * np.diag(gram)
    weights, *_ = np.linalg.lstsq(gram, rhs, rcond=None)
    center = origin + weights @ q
    radius = float(np.sqrt(np.max(np.sum((points - center) ** 2, axis=1))))
    return center, radius


def affine_circumcenter(points: np.ndarray) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Circumcentre of *points* within their affine hull and its barycentric weights.

    The weights are ``None`` when the points are affinely dependent.
    """

    points = np.asarray(points, dtype=float)
    center, _ = _ball_through(points)
    if len(points) == 1:
        return center, np.ones(1)
    q = points[1:] - points[0]
    if np.linalg.matrix_rank(q) < len(q):
        return center, None
    local, *_ = np.linalg.lstsq(q.T, center - points[0], rcond=None)
    return center, np.concatenate([[1.0 - local.sum()], local])


def _inside(center: np.ndarray, radius: float, point: np.ndarray) -> bool:
    if radius < 0.0:
        return False
    return float(np.linalg.norm(point - center)) <= radius * (1.0 + _BALL_SLACK) + DEGENERATE_VOLUME


def _move_to_front(points: List[np.ndarray], end: int, support: List[np.ndarray], dim: int) -> Tuple[np.ndarray, float]:
    if support:
        center, radius = _ball_through(np.asarray(support))
    else:
        center, radius = np.zeros(dim), -1.0
    if len(support) == dim + 1:
        return center, radius
    for i in range(end):
        point = points[i]
        if not _inside(center, radius, point):
            center, radius = _move_to_front(points, i, support + [point], dim)
            points.insert(0, points.pop(i))
    return center, radius


def smallest_enclosing_ball(points: Iterable[Sequence[float]] | np.ndarray) -> Ball:
    """Welzl's move-to-front algorithm with the input order as the deterministic order."""

    arr = _as_vertex_array(points)
    if len(arr) == 0:
        raise GeometryError("cannot enclose an empty point set")
    order = [row for row in arr]
    center, radius = _move_to_front(order, len(order), [], arr.shape[1])
    return Ball(center=center, radius=max(radius, 0.0))


def min_containment_ball(s: Simplex) -> Ball:
    """Smallest ball containing all vertices of *s* (defined for degenerate input too)."""

    return smallest_enclosing_ball(s.vertices)


def enclosing_ball_brute_force(points: Iterable[Sequence[float]] | np.ndarray) -> Ball:
    """Reference minimal enclosing ball over every affinely independent support subset."""

    arr = _as_vertex_array(points)
    dim = arr.shape[1]
    best: Optional[Tuple[np.ndarray, float]] = None
    for size in range(1, min(len(arr), dim + 1) + 1):
        for subset in combinations(range(len(arr)), size):
            chosen = arr[list(subset)]
            if size > 1 and np.linalg.matrix_rank(chosen[1:] - chosen[0]) < size - 1:
                continue
            center, radius = _ball_through(chosen)
            if all(_inside(center, radius, point) for point in arr):
                if best is None or radius < best[1]:
                    best = (center, radius)
    if best is None:
        raise GeometryError("no enclosing ball found")
    return Ball(center=best[0], radius=best[1])


# ---------------------------------------------------------------------------
# Batched helpers over a whole mesh


def cell_volumes(points: np.ndarray, cells: np.ndarray) -> np.ndarray:
    """|K| for every row of *cells* (indices into *points*)."""

    if len(cells) == 0:
        return np.zeros(0)
    verts = points[cells]
    q = verts[:, 1:, :] - verts[:, :1, :]
    return np.abs(np.linalg.det(q)) / math.factorial(points.shape[1])


def circumspheres(points: np.ndarray, cells: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Circumcentres and circumradii of all cells; NaN for degenerate cells."""

    dim = points.shape[1]
    if len(cells) == 0:
        return np.zeros((0, dim)), np.zeros(0)
    verts = points[cells]
    origin = verts[:, 0, :]
    q = verts[:, 1:, :] - origin[:, None, :]
    rhs = np.einsum("mij,mij->mi", q, q)
    centers = np.full((len(cells), dim), np.nan)
    dets = np.linalg.det(q)
    scale = np.maximum(np.max(np.abs(q), axis=(1, 2)), DEGENERATE_VOLUME) ** dim
    good = np.abs(dets) > 1e-14 * scale
    if np.any(good):
        offsets = np.linalg.solve(2.0 * q[good], rhs[good][..., None])[..., 0]
        centers[good] = origin[good] + offsets
    radii = np.linalg.norm(centers - origin, axis=1)
    return centers, radii
