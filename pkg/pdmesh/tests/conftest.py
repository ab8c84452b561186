"""Shared mesh fixtures with closed-form quality values."""

from __future__ import annotations

import numpy as np
import pytest

from pdmesh.core.delaunay import delaunay_triangulate
from pdmesh.core.geometry import Simplex
from pdmesh.core.mesh import PointSet, SimplicialMesh


@pytest.fixture
def right_triangle() -> Simplex:
    return Simplex(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))


@pytest.fixture
def equilateral() -> Simplex:
    return Simplex(np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3.0) / 2.0]]))


@pytest.fixture
def unit_tetrahedron() -> Simplex:
    return Simplex(np.vstack([np.zeros((1, 3)), np.eye(3)]))


@pytest.fixture
def triangle_mesh(right_triangle: Simplex) -> SimplicialMesh:
    return SimplicialMesh(right_triangle.vertices, [[0, 1, 2]])


@pytest.fixture
def square_mesh() -> SimplicialMesh:
    """Unit square split into four triangles around its centre (vertex 4)."""

    coords = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]]
    cells = [[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]]
    return SimplicialMesh(coords, cells)


@pytest.fixture
def random_mesh() -> SimplicialMesh:
    rng = np.random.default_rng(11)
    corners = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    return delaunay_triangulate(PointSet(np.vstack([corners, rng.random((16, 2))])))
