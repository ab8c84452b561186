"""Unit tests for the P1 Poisson assembly, solver and error bounds."""

from __future__ import annotations

import numpy as np
import pytest

from pdmesh.analysis.fem import (
    PoissonProblem,
    approximation_bounds,
    assemble,
    energy_error_identity,
    energy_functional,
    galerkin_residual,
    gradient_error,
    interpolation_gradient_error,
    list_mms,
    make_mms,
    run_record,
    solve,
)
from pdmesh.core.mesh import SimplicialMesh
from pdmesh.errors import AssemblyError, FieldError, SolverError
from pdmesh.verify.families import structured_grid


def test_registered_cases() -> None:
    assert list_mms() == ["affine", "quadratic-bubble", "sine-product"]
    with pytest.raises(FieldError):
        make_mms("cubic", 2)


def test_square_stiffness(square_mesh: SimplicialMesh) -> None:
    system = assemble(PoissonProblem.from_mms(square_mesh, "sine-product"))
    assert system.matrix.toarray() == pytest.approx(np.array([[4.0]]))
    assert system.interior.tolist() == [4]
    assert np.allclose(np.asarray(system.stiffness.sum(axis=1)).ravel(), 0.0)


@pytest.mark.parametrize("dim", [2, 3])
def test_stiffness_is_symmetric_with_zero_row_sums(dim: int) -> None:
    system = assemble(PoissonProblem.from_mms(structured_grid(dim, 3), "sine-product"))
    dense = system.stiffness.toarray()
    assert np.allclose(dense, dense.T)
    assert np.allclose(dense.sum(axis=1), 0.0, atol=1e-12)
    assert np.all(np.linalg.eigvalsh(system.matrix.toarray()) > 0.0)


def test_kuhn_grid_centre_row_is_the_five_point_stencil() -> None:
    system = assemble(PoissonProblem.from_mms(structured_grid(2, 2), "sine-product"))
    assert system.matrix.toarray() == pytest.approx(np.array([[4.0]]))


def test_affine_solution_is_reproduced() -> None:
    mesh = structured_grid(2, 4)
    system = assemble(PoissonProblem.from_mms(mesh, "affine"))
    solution = solve(system, 1e-12)
    exact = system.problem.exact.value(mesh.coords)
    assert np.allclose(solution.values, exact, atol=1e-8)
    assert gradient_error(system, solution) == pytest.approx(0.0, abs=1e-8)


def test_sine_product_solve_and_cea_step() -> None:
    system = assemble(PoissonProblem.from_mms(structured_grid(2, 8), "sine-product"))
    solution = solve(system)
    assert solution.residual <= 1e-10
    assert solution.iterations > 0
    cea, first, second = approximation_bounds(system, solution, 1.0)
    assert cea.name == "fem.cea" and cea.passed
    assert cea.rhs == pytest.approx(interpolation_gradient_error(system))
    assert first.name == "thm.fem_grad" and second.name == "thm.fem_hessian"


def test_gradient_error_decreases_linearly() -> None:
    errors = []
    for n in (4, 8):
        system = assemble(PoissonProblem.from_mms(structured_grid(2, n), "sine-product"))
        errors.append(gradient_error(system, solve(system)))
    assert errors[1] == pytest.approx(errors[0] / 2.0, rel=0.15)


def test_energy_is_minimal_at_the_discrete_solution() -> None:
    system = assemble(PoissonProblem.from_mms(structured_grid(2, 6), "sine-product"))
    solution = solve(system)
    at_solution = energy_functional(solution.values, system)
    rng = np.random.default_rng(0)
    for _ in range(10):
        trial = solution.values[system.interior] + rng.normal(0.0, 0.05, size=system.size)
        assert energy_functional(trial, system) > at_solution


def test_galerkin_orthogonality_with_exact_load() -> None:
    system = assemble(PoissonProblem.from_mms(structured_grid(2, 6), "quadratic-bubble"))
    solution = solve(system, 1e-12)
    rng = np.random.default_rng(1)
    for _ in range(5):
        assert galerkin_residual(system, solution, rng.normal(size=system.size)) == pytest.approx(0.0, abs=1e-8)


def test_galerkin_test_function_must_vanish_on_boundary(square_mesh: SimplicialMesh) -> None:
    system = assemble(PoissonProblem.from_mms(square_mesh, "quadratic-bubble"))
    with pytest.raises(AssemblyError):
        galerkin_residual(system, solve(system), np.ones(square_mesh.n_vertices))


def test_energy_error_identity() -> None:
    system = assemble(PoissonProblem.from_mms(structured_grid(2, 5), "quadratic-bubble"))
    lhs, rhs = energy_error_identity(system, solve(system, 1e-12))
    assert lhs == pytest.approx(rhs, rel=1e-6, abs=1e-12)


def test_zero_load_gives_zero_solution(square_mesh: SimplicialMesh) -> None:
    problem = PoissonProblem(mesh=square_mesh, forcing=lambda x: np.zeros(len(x)))
    solution = solve(assemble(problem))
    assert solution.iterations == 0
    assert np.all(solution.values == 0.0)


def test_assembly_errors(triangle_mesh: SimplicialMesh) -> None:
    with pytest.raises(AssemblyError, match="interior"):
        assemble(PoissonProblem.from_mms(triangle_mesh, "sine-product"))
    with pytest.raises(AssemblyError, match="allow_high_dim"):
        assemble(PoissonProblem.from_mms(structured_grid(4, 2), "sine-product"))


def test_high_dimension_needs_opt_in() -> None:
    system = assemble(PoissonProblem.from_mms(structured_grid(4, 2), "sine-product"), allow_high_dim=True)
    assert system.size == 1


def test_solver_reports_non_convergence() -> None:
    system = assemble(PoissonProblem.from_mms(structured_grid(2, 8), "sine-product"))
    with pytest.raises(SolverError):
        solve(system, 1e-14, maxiter=1)


def test_run_record() -> None:
    system = assemble(PoissonProblem.from_mms(structured_grid(2, 4), "sine-product"))
    record = run_record(system, solve(system))
    assert record["unknowns"] == 9
    assert record["case"] == "sine-product"
    assert record["gradient_error"] > 0.0
