"""Planar Delaunay optimality against flip-generated alternative triangulations.

Alternatives come from random sequences of legal edge flips applied to the
Delaunay mesh, so they triangulate exactly the same point set. Rajan's Θ and
the largest min-containment radius decide pass/fail; the minimum angle and
the Dirichlet energy of a random piecewise-linear function are recorded as
extra witnesses.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from pdmesh.core.delaunay import delaunay_triangulate
from pdmesh.core.mesh import PointSet, SimplicialMesh
from pdmesh.core.predicates import orientation
from pdmesh.core.quality import quality_report
from pdmesh.errors import ExperimentError
from pdmesh.interp.interpolation import cell_maps
from pdmesh.utils.logging_utils import get_logger

from .experiment import derive_seed

__all__ = [
    "OPTIMALITY_RTOL",
    "DECIDING",
    "OptimalityRow",
    "OptimalityTable",
    "flippable_edges",
    "flip_edge",
    "random_flips",
    "min_angle",
    "dirichlet_energy",
    "delaunay_optimality_2d",
]

_LOGGER = get_logger("Optimality")

OPTIMALITY_RTOL = 1e-9
DECIDING = ("theta", "r_max")

Edge = Tuple[int, int]


def _edge_owners(cells: np.ndarray) -> Dict[Edge, List[int]]:
    owners: Dict[Edge, List[int]] = defaultdict(list)
    for cid, (a, b, c) in enumerate(cells.tolist()):
        for u, v in ((a, b), (b, c), (a, c)):
            owners[(min(u, v), max(u, v))].append(cid)
    return owners


def _opposite(cell: Sequence[int], edge: Edge) -> int:
    return next(v for v in cell if v not in edge)


def flippable_edges(m: SimplicialMesh) -> List[Edge]:
    """Interior edges whose two triangles form a strictly convex quadrilateral."""

    if m.dim != 2:
        raise ExperimentError("edge flips are implemented for planar meshes only")
    cells = m.cells
    out: List[Edge] = []
    for edge, owners in sorted(_edge_owners(cells).items()):
        if len(owners) != 2:
            continue
        c = _opposite(cells[owners[0]], edge)
        d = _opposite(cells[owners[1]], edge)
        diagonal = m.coords[[c, d]]
        side_a = orientation(np.vstack([diagonal, m.coords[edge[0]]]))
        side_b = orientation(np.vstack([diagonal, m.coords[edge[1]]]))
        if side_a * side_b < 0:
            out.append(edge)
    return out


def flip_edge(m: SimplicialMesh, edge: Edge) -> SimplicialMesh:
    """Replace the two triangles on *edge* by the two on the other diagonal."""

    edge = (min(edge), max(edge))
    owners = _edge_owners(m.cells).get(edge, [])
    if len(owners) != 2:
        raise ExperimentError(f"edge {edge} is not an interior edge")
    first, second = owners
    c = _opposite(m.cells[first], edge)
    d = _opposite(m.cells[second], edge)
    cells = m.cells.copy()
    cells[first] = (edge[0], c, d)
    cells[second] = (edge[1], c, d)
    return m.with_cells(cells)


def random_flips(m: SimplicialMesh, count: int, rng: np.random.Generator) -> Tuple[SimplicialMesh, int]:
    """Apply up to *count* random legal flips; returns the mesh and the flips done."""

    done = 0
    for _ in range(int(count)):
        candidates = flippable_edges(m)
        if not candidates:
            break
        m = flip_edge(m, candidates[int(rng.integers(len(candidates)))])
        done += 1
    return m, done


def min_angle(m: SimplicialMesh) -> float:
    """Smallest interior angle (radians) over all triangles."""

    verts = m.cell_coords()
    smallest = math.pi
    for i in range(3):
        u = verts[:, (i + 1) % 3] - verts[:, i]
        v = verts[:, (i + 2) % 3] - verts[:, i]
        cosine = np.einsum("md,md->m", u, v) / (np.linalg.norm(u, axis=1) * np.linalg.norm(v, axis=1))
        smallest = min(smallest, float(np.arccos(np.clip(cosine, -1.0, 1.0)).min()))
    return smallest


def dirichlet_energy(m: SimplicialMesh, values: np.ndarray) -> float:
    """∫ |∇u_h|² for the piecewise-linear u_h with the given nodal values."""

    _, matrices, jacobians = cell_maps(m)
    local = np.asarray(values, dtype=float)[m.cells]
    differences = local[:, 1:] - local[:, :1]
    gradients = np.linalg.solve(np.transpose(matrices, (0, 2, 1)), differences[..., None])[..., 0]
    return float(np.sum(jacobians / math.factorial(m.dim) * np.einsum("md,md->m", gradients, gradients)))


@dataclass(frozen=True)
class OptimalityRow:
    point_set: int
    alternative: int
    flips: int
    values: Dict[str, Tuple[float, float]]

    def violations(self) -> Dict[str, bool]:
        """Per quantity: does the alternative beat Delaunay beyond rounding?"""

        out: Dict[str, bool] = {}
        for name, (delaunay, alternative) in self.values.items():
            if name == "min_angle":
                out[name] = delaunay < alternative * (1.0 - OPTIMALITY_RTOL)
            else:
                out[name] = delaunay > alternative * (1.0 + OPTIMALITY_RTOL)
        return out

    def to_dict(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {"point_set": self.point_set, "alternative": self.alternative, "flips": self.flips}
        for name, (delaunay, alternative) in self.values.items():
            row[f"{name}_delaunay"] = delaunay
            row[f"{name}_alternative"] = alternative
        return row


@dataclass(frozen=True)
class OptimalityTable:
    rows: Tuple[OptimalityRow, ...]
    violations: Dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.violations.get(name, 0) == 0 for name in DECIDING)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "violations": dict(self.violations),
            "rows": [row.to_dict() for row in self.rows],
        }


def _measure(m: SimplicialMesh, data: np.ndarray) -> Dict[str, float]:
    report = quality_report(m, workers=1)
    return {
        "theta": report.theta,
        "r_max": report.r_max,
        "min_angle": min_angle(m),
        "dirichlet_energy": dirichlet_energy(m, data),
    }


def delaunay_optimality_2d(
    seed: int,
    n_points: int,
    n_alternatives: int,
    *,
    n_sets: int = 1,
    max_flips: int = 10,
) -> OptimalityTable:
    """Compare each seeded planar Delaunay mesh with *n_alternatives* flipped variants."""

    if n_points < 4:
        raise ExperimentError(f"optimality comparisons need at least 4 points, got {n_points}")
    rows: List[OptimalityRow] = []
    counts = {"theta": 0, "r_max": 0, "min_angle": 0, "dirichlet_energy": 0}
    for index in range(int(n_sets)):
        rng = np.random.default_rng(derive_seed(seed, index))
        points = rng.random((int(n_points), 2))
        data = rng.normal(size=int(n_points))
        delaunay = delaunay_triangulate(PointSet(points))
        reference = _measure(delaunay, data)
        for alternative in range(int(n_alternatives)):
            flipped, done = random_flips(delaunay, int(rng.integers(1, max_flips + 1)), rng)
            measured = _measure(flipped, data)
            row = OptimalityRow(
                point_set=index,
                alternative=alternative,
                flips=done,
                values={name: (reference[name], measured[name]) for name in counts},
            )
            for name, violated in row.violations().items():
                counts[name] += int(violated)
            rows.append(row)
    table = OptimalityTable(rows=tuple(rows), violations=counts)
    _LOGGER.info("Delaunay optimality: %d comparisons, violations %s", len(rows), counts)
    return table
