"""Unit tests for the reference Lagrange basis and affine maps."""

from __future__ import annotations

import math

import numpy as np
import pytest

from pdmesh.core.geometry import Simplex
from pdmesh.errors import DegenerateSimplexError, InterpolationError
from pdmesh.interp.reference import AffineMap, reference_basis, reference_nodes


@pytest.mark.parametrize("dim,k", [(1, 3), (2, 1), (2, 2), (3, 2), (3, 3), (4, 2)])
def test_basis_is_nodal(dim: int, k: int) -> None:
    basis = reference_basis(dim, k)
    assert basis.size == math.comb(k + dim, dim)
    assert np.allclose(basis.evaluate(basis.nodes), np.eye(basis.size), atol=1e-10)


@pytest.mark.parametrize("dim,k", [(2, 2), (3, 1), (3, 3)])
def test_basis_is_a_partition_of_unity(dim: int, k: int) -> None:
    basis = reference_basis(dim, k)
    xi = np.random.default_rng(0).dirichlet(np.ones(dim + 1), size=12)[:, 1:]
    assert np.allclose(basis.evaluate(xi).sum(axis=1), 1.0)
    assert np.allclose(basis.gradient(xi).sum(axis=1), 0.0, atol=1e-9)


def test_linear_basis_gradients() -> None:
    grads = reference_basis(2, 1).gradient(np.array([[0.2, 0.3]]))[0]
    assert np.allclose(grads, [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])


def test_degree_zero_nodes_are_vertices() -> None:
    assert reference_nodes(2, 0).tolist() == [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]


def test_unsupported_degree() -> None:
    with pytest.raises(InterpolationError):
        reference_basis(2, 7)


def test_affine_map_round_trip(unit_tetrahedron: Simplex) -> None:
    moved = unit_tetrahedron.transformed(np.diag([2.0, 1.0, 0.5]), [1.0, 1.0, 1.0])
    affine = AffineMap.from_simplex(moved)
    assert np.allclose(affine(np.eye(3)), moved.vertices[1:])
    x = np.array([[1.5, 1.2, 1.1]])
    assert affine(affine.inverse(x)) == pytest.approx(x)
    assert abs(affine.det) == pytest.approx(1.0)


def test_affine_map_of_flat_simplex() -> None:
    with pytest.raises(DegenerateSimplexError):
        AffineMap.from_simplex(Simplex(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])))
