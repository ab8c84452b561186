"""Unit tests for the roughness functional, norms and bound evaluators."""

from __future__ import annotations

import math

import pytest

from pdmesh.analysis.functionals import (
    BoundCheckResult,
    c_d,
    c_rho,
    empirical_constant,
    equivalence_bounds,
    gradient_norm,
    h1_seminorm,
    hessian_norm,
    interp_bound_l2,
    interp_bound_llambda,
    lemma2_bound,
    regularity_bound_check,
    roughness,
    theta_bound_check,
    thickness_bound_check,
    vector_bounds,
    w1_norm,
)
from pdmesh.core.mesh import SimplicialMesh
from pdmesh.core.quality import quality_report
from pdmesh.errors import BoundError, FieldError
from pdmesh.interp.fields import gradient_field, make_field, random_polynomial
from pdmesh.verify.families import structured_grid


def test_constants() -> None:
    assert c_d(2) == pytest.approx(math.sqrt(3.0))
    assert c_d(3) == pytest.approx(math.sqrt(6.0))
    assert c_rho(2, 2.0) == pytest.approx(math.sqrt(2.0 * math.sqrt(6.0)), rel=1e-14)
    assert c_rho(3, 4.0) == pytest.approx(math.sqrt(3.0 * 8.0**0.25), rel=1e-14)
    assert c_rho(3, math.inf) == pytest.approx(math.sqrt(3.0))
    with pytest.raises(BoundError):
        c_rho(2, 1.0)


def test_roughness_of_constant_vector_on_right_triangle(triangle_mesh: SimplicialMesh) -> None:
    w = make_field("constant", 2, value=[1.0, 0.0])
    assert roughness(w, triangle_mesh) == pytest.approx(math.sqrt(0.5))
    lower, upper = equivalence_bounds(w, triangle_mesh)
    assert lower.lhs == pytest.approx(math.sqrt(3.0) * 0.25 * math.sqrt(0.5))
    assert upper.rhs == pytest.approx(1.0)
    assert lower.passed and upper.passed


def test_roughness_needs_a_vector_field(triangle_mesh: SimplicialMesh) -> None:
    with pytest.raises(FieldError):
        roughness(make_field("quadratic", 2), triangle_mesh)


def test_roughness_of_gradient_equals_vector_form(random_mesh: SimplicialMesh) -> None:
    v = random_polynomial(2, 3, seed=4)
    first = equivalence_bounds(v, random_mesh)[0].constants["Psi"]
    second = equivalence_bounds(gradient_field(v), random_mesh)[0].constants["Psi"]
    assert first == second


def test_norms_of_quadratic_on_unit_square() -> None:
    mesh = structured_grid(2, 3)
    v = make_field("quadratic", 2)
    # |∇v|² = 4|x|², integrated over the unit square gives 8/3
    assert gradient_norm(v, mesh) == pytest.approx(math.sqrt(8.0 / 3.0))
    assert h1_seminorm(v, mesh) == pytest.approx(math.sqrt(8.0 / 3.0))
    assert hessian_norm(v, mesh) == pytest.approx(math.sqrt(8.0))
    assert hessian_norm(v, mesh, math.inf) == pytest.approx(2.0)
    assert w1_norm(v, mesh, math.inf) == pytest.approx(2.0)


@pytest.mark.parametrize("rho", [1.5, 2.0, 4.0, math.inf])
def test_lemma2_holds_on_random_mesh(rho: float, random_mesh: SimplicialMesh) -> None:
    report = quality_report(random_mesh)
    result = lemma2_bound(random_polynomial(2, 3, seed=9), random_mesh, rho, report=report)
    assert result.passed
    assert result.constants["C_rho"] == pytest.approx(c_rho(2, rho))


def test_equivalence_holds_for_vector_fields(random_mesh: SimplicialMesh) -> None:
    lower, upper = equivalence_bounds(make_field("sine-cosine", 2), random_mesh)
    assert lower.passed and upper.passed
    assert lower.name == "lemma1.lower" and upper.name == "lemma1.upper"


def test_reproduced_field_has_zero_empirical_constant(random_mesh: SimplicialMesh) -> None:
    result = interp_bound_l2(make_field("quadratic", 2), random_mesh, 1, 2.0, 1.0)
    assert result.passed
    assert empirical_constant(result) == 0.0


def test_empirical_constant_is_the_tight_constant(random_mesh: SimplicialMesh) -> None:
    result = interp_bound_llambda(make_field("trig-product", 2), random_mesh, 1, 2.0, 1.0)
    tight = empirical_constant(result)
    assert tight > 0.0
    assert result.with_c_int(tight).rhs == pytest.approx(result.lhs)
    assert result.with_c_int(2.0 * tight).passed
    assert not result.with_c_int(0.5 * tight).passed


def test_llambda_rhs_closed_form(random_mesh: SimplicialMesh) -> None:
    report = quality_report(random_mesh)
    result = interp_bound_llambda(make_field("trig-product", 2), random_mesh, 1, 2.0, 3.0, report=report)
    expected = 2.0 * 3.0 * report.r_max * result.constants["second_derivative_norm"]
    assert result.rhs == pytest.approx(expected)


def test_vector_bounds_select_one_form(random_mesh: SimplicialMesh) -> None:
    f = make_field("sine-cosine", 2)
    assert vector_bounds(f, random_mesh, 1, 1.0, rho=2.0).name == "thm.vector_l2"
    assert vector_bounds(f, random_mesh, 1, 1.0, lam=math.inf).name == "thm.vector_llambda"
    with pytest.raises(BoundError):
        vector_bounds(f, random_mesh, 1, 1.0)
    with pytest.raises(BoundError):
        vector_bounds(f, random_mesh, 1, 1.0, rho=2.0, lam=2.0)
    with pytest.raises(FieldError):
        interp_bound_l2(f, random_mesh, 1, 2.0, 1.0)


def test_theta_bound(random_mesh: SimplicialMesh) -> None:
    assert theta_bound_check(quality_report(random_mesh)).passed


def test_unprotected_mesh_makes_remarks_vacuous(square_mesh: SimplicialMesh) -> None:
    report = quality_report(square_mesh)
    lower = thickness_bound_check(report, 0.0, 0.5)
    upper = regularity_bound_check(report, 0.0, 0.5)
    assert lower.passed and upper.passed
    assert lower.note.startswith("vacuous")
    assert math.isinf(upper.rhs)


def test_bound_check_result_tolerances() -> None:
    assert BoundCheckResult("x", 1.0 + 1e-12, 1.0).passed
    assert not BoundCheckResult("x", 1.1, 1.0).passed
    assert BoundCheckResult("x", 1e-12, 0.0, atol=1e-10).passed
    with pytest.raises(BoundError):
        BoundCheckResult("x", 1.0, 1.0).with_c_int(2.0)
    payload = BoundCheckResult("x", 1.0, 2.0, {"c_int": 1.0}).to_dict()
    assert payload["slack"] == 1.0 and payload["pass"] is True
