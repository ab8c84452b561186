"""Unit tests for point sets, meshes and net parameters."""

from __future__ import annotations

import math

import numpy as np
import pytest

from pdmesh.core.mesh import PointSet, SimplicialMesh, locate_points, net_parameters, validate_manifold
from pdmesh.errors import DimensionMismatchError, MeshError


def test_point_set_rejects_mixed_dimensions() -> None:
    with pytest.raises(DimensionMismatchError):
        PointSet([[0.0, 0.0], [1.0, 0.0, 0.0]])


def test_point_set_rejects_non_finite_coordinates() -> None:
    with pytest.raises(MeshError):
        PointSet([[0.0, math.nan]])


def test_cells_must_reference_existing_vertices() -> None:
    with pytest.raises(MeshError, match="vertex 3"):
        SimplicialMesh([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[0, 1, 3]])


def test_boundary_and_interior_vertices(square_mesh: SimplicialMesh) -> None:
    assert square_mesh.boundary_vertices().tolist() == [0, 1, 2, 3]
    assert square_mesh.interior_vertices().tolist() == [4]
    assert len(square_mesh.boundary_facets()) == 4
    assert square_mesh.volumes().sum() == pytest.approx(1.0)


def test_manifold_report(square_mesh: SimplicialMesh) -> None:
    assert validate_manifold(square_mesh).passed

    duplicated = square_mesh.with_cells(np.vstack([square_mesh.cells, square_mesh.cells[:1]]))
    report = validate_manifold(duplicated)
    assert not report.passed
    assert report.duplicate_cells == ((0, 1, 4),)


def test_disconnected_mesh_fails_manifold_check() -> None:
    coords = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [5.0, 5.0], [6.0, 5.0], [5.0, 6.0]]
    report = validate_manifold(SimplicialMesh(coords, [[0, 1, 2], [3, 4, 5]]))
    assert report.n_components == 2
    assert not report.passed


def test_locate_points(square_mesh: SimplicialMesh) -> None:
    found = locate_points(square_mesh, np.array([[0.5, 0.1], [0.9, 0.5], [2.0, 2.0]]))
    assert found.tolist() == [0, 1, -1]


def test_relabeled_mesh_keeps_geometry(square_mesh: SimplicialMesh) -> None:
    moved = square_mesh.relabeled([4, 3, 2, 1, 0])
    assert moved.coords[0].tolist() == [0.5, 0.5]
    assert sorted(moved.volumes().tolist()) == pytest.approx(sorted(square_mesh.volumes().tolist()))


def test_net_parameters_of_square(square_mesh: SimplicialMesh) -> None:
    net = net_parameters(square_mesh.points, square_mesh)
    assert net.eta == pytest.approx(math.sqrt(2.0) / 2.0)
    assert net.epsilon == pytest.approx(0.5)
    assert net.eta_bar == pytest.approx(math.sqrt(2.0))


def test_net_parameters_need_two_points() -> None:
    single = PointSet([[0.0, 0.0]])
    with pytest.raises(MeshError):
        net_parameters(single, SimplicialMesh([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[0, 1, 2]]))
