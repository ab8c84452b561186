"""Unit tests for local/global Lagrange interpolation and L_p norms."""

from __future__ import annotations

import math

import numpy as np
import pytest

from pdmesh.core.geometry import Simplex
from pdmesh.core.mesh import SimplicialMesh
from pdmesh.errors import InterpolationError
from pdmesh.interp.fields import make_field, random_polynomial
from pdmesh.interp.interpolation import (
    difference,
    integrate,
    interpolate_global,
    interpolate_local,
    lp_norm,
)
from pdmesh.interp.reference import reference_basis
from pdmesh.verify.families import structured_grid


@pytest.mark.parametrize("k", [1, 2, 3])
def test_interpolation_reproduces_polynomials_of_degree_k(k: int, random_mesh: SimplicialMesh) -> None:
    v = random_polynomial(2, k, seed=k)
    residual = lp_norm(difference(v, interpolate_global(v, random_mesh, k)), random_mesh, 2.0)
    assert residual <= 1e-10 * max(lp_norm(v, random_mesh, 2.0), 1.0)


def test_local_interpolant_matches_nodal_values(unit_tetrahedron: Simplex) -> None:
    v = make_field("gaussian-bump", 3)
    local = interpolate_local(v, unit_tetrahedron, reference_basis(3, 2))
    nodes = local.nodes()
    assert np.allclose(local(nodes), v.value(nodes))


def test_single_cell_global_equals_local(triangle_mesh: SimplicialMesh) -> None:
    v = make_field("trig-product", 2)
    basis = reference_basis(2, 2)
    global_ = interpolate_global(v, triangle_mesh, 2)
    local = interpolate_local(v, triangle_mesh.simplex(0), basis)
    x = np.array([[0.2, 0.3], [0.1, 0.1]])
    assert np.allclose(global_(x), local(x))


def test_interpolant_is_continuous_across_shared_facets(square_mesh: SimplicialMesh) -> None:
    v = make_field("trig-product", 2)
    interpolant = interpolate_global(v, square_mesh, 2)
    shared = np.array([[0.25, 0.25]])
    left = interpolant.local(0)(shared)
    right = interpolant.local(3)(shared)
    assert np.allclose(left, right)


def test_vector_interpolation_is_componentwise(square_mesh: SimplicialMesh) -> None:
    f = make_field("sine-cosine", 2)
    stacked = interpolate_global(f, square_mesh, 2).coefficients
    first = interpolate_global(lambda x: f.value(x)[:, 0], square_mesh, 2).coefficients
    assert np.allclose(stacked[..., 0], first)


def test_integrals_and_norms_on_unit_square() -> None:
    mesh = structured_grid(2, 4)
    assert integrate(make_field("constant", 2), mesh) == pytest.approx(1.0)
    assert integrate(make_field("quadratic", 2), mesh) == pytest.approx(2.0 / 3.0)
    assert lp_norm(make_field("affine", 2, a=[1.0, 0.0]), mesh, 2.0) == pytest.approx(math.sqrt(1.0 / 3.0))
    assert lp_norm(make_field("affine", 2, a=[1.0, 1.0]), mesh, math.inf) == pytest.approx(2.0)


def test_p1_error_decreases_under_refinement() -> None:
    v = make_field("trig-product", 2)
    errors = [lp_norm(difference(v, interpolate_global(v, structured_grid(2, n), 1)), structured_grid(2, n), 2.0) for n in (4, 8)]
    assert errors[1] == pytest.approx(errors[0] / 4.0, rel=0.15)


def test_evaluation_outside_the_mesh(triangle_mesh: SimplicialMesh) -> None:
    interpolant = interpolate_global(make_field("affine", 2), triangle_mesh, 1)
    with pytest.raises(InterpolationError, match="outside"):
        interpolant(np.array([[2.0, 2.0]]))


def test_norm_exponent_must_be_at_least_one(triangle_mesh: SimplicialMesh) -> None:
    with pytest.raises(InterpolationError):
        lp_norm(make_field("affine", 2), triangle_mesh, 0.5)
