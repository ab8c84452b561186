"""Unit tests for edge flips and the planar Delaunay optimality comparison."""

from __future__ import annotations

import math

import numpy as np
import pytest

from pdmesh.core.delaunay import delaunay_triangulate
from pdmesh.core.mesh import PointSet, SimplicialMesh
from pdmesh.errors import ExperimentError
from pdmesh.verify.families import structured_grid
from pdmesh.verify.optimality import (
    OptimalityRow,
    delaunay_optimality_2d,
    dirichlet_energy,
    flip_edge,
    flippable_edges,
    min_angle,
    random_flips,
)


def _unit_square() -> SimplicialMesh:
    return delaunay_triangulate(PointSet([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))


def test_square_has_one_flippable_diagonal() -> None:
    mesh = _unit_square()
    (edge,) = flippable_edges(mesh)
    flipped = flip_edge(mesh, edge)
    assert flipped.n_cells == 2
    assert flippable_edges(flipped) != [edge]
    assert flipped.volumes().sum() == pytest.approx(1.0)


def test_star_edges_are_not_flippable(square_mesh: SimplicialMesh) -> None:
    assert flippable_edges(square_mesh) == []


def test_flip_requires_interior_edge(square_mesh: SimplicialMesh) -> None:
    with pytest.raises(ExperimentError):
        flip_edge(square_mesh, (0, 1))


def test_flips_need_a_planar_mesh() -> None:
    with pytest.raises(ExperimentError):
        flippable_edges(structured_grid(3, 1))


def test_random_flips_preserve_the_point_set() -> None:
    mesh = structured_grid(2, 3)
    flipped, done = random_flips(mesh, 5, np.random.default_rng(2))
    assert done == 5
    assert flipped.n_cells == mesh.n_cells
    assert flipped.volumes().sum() == pytest.approx(1.0)


def test_angle_and_energy(square_mesh: SimplicialMesh) -> None:
    assert min_angle(square_mesh) == pytest.approx(math.pi / 4.0)
    assert dirichlet_energy(square_mesh, square_mesh.coords[:, 0]) == pytest.approx(1.0)


def test_row_violations() -> None:
    row = OptimalityRow(0, 0, 1, {"theta": (2.0, 3.0), "r_max": (0.6, 0.5), "min_angle": (0.5, 0.6)})
    assert row.violations() == {"theta": False, "r_max": True, "min_angle": True}
    assert row.to_dict()["r_max_alternative"] == 0.5


def test_delaunay_wins_every_comparison() -> None:
    table = delaunay_optimality_2d(0, 10, 5, n_sets=2)
    assert len(table.rows) == 10
    assert table.passed
    assert table.violations["min_angle"] == 0
    assert table.violations["dirichlet_energy"] == 0


def test_too_few_points() -> None:
    with pytest.raises(ExperimentError):
        delaunay_optimality_2d(0, 3, 5)
