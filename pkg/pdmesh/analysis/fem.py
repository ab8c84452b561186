"""Piecewise-linear finite elements for the Dirichlet Poisson problem -Δu = f.

Stiffness entries come from the constant barycentric gradients of each cell,
the load vector from a positive-weight rule of exactness 4, and Dirichlet data
is eliminated row/column-wise so the reduced matrix stays SPD. Boundary
vertices carry the nodal values of the boundary data (zero unless a
manufactured solution says otherwise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix, diags
from scipy.sparse.linalg import cg

from pdmesh.core.mesh import SimplicialMesh, validate_manifold
from pdmesh.core.quality import QualityReport, quality_report
from pdmesh.errors import AssemblyError, FieldError, SolverError
from pdmesh.interp.fields import AnalyticField, make_field, polynomial_field
from pdmesh.interp.interpolation import cell_maps, cellwise, integrate_cellwise, lp_norm
from pdmesh.interp.quadrature import QuadratureRule, quadrature_rule
from pdmesh.utils.logging_utils import get_logger

from .functionals import RESIDUAL_ATOL, BoundCheckResult, norm_rule

__all__ = [
    "LOAD_EXACTNESS",
    "ManufacturedSolution",
    "PoissonProblem",
    "LinearSystem",
    "DiscreteSolution",
    "register_mms",
    "make_mms",
    "list_mms",
    "assemble",
    "solve",
    "energy_functional",
    "gradient_error",
    "interpolation_gradient_error",
    "approximation_bounds",
    "galerkin_residual",
    "energy_error_identity",
    "run_record",
]

_LOGGER = get_logger("FEM")

LOAD_EXACTNESS = 4
CEA_RTOL = 1e-8


# ---------------------------------------------------------------------------
# manufactured solutions


@dataclass(frozen=True, eq=False)
class ManufacturedSolution:
    name: str
    exact: AnalyticField
    forcing: Callable[[np.ndarray], np.ndarray]
    homogeneous: bool = True


def _negative_laplacian(u: AnalyticField) -> Callable[[np.ndarray], np.ndarray]:
    return lambda x: -np.trace(u.hessian(x), axis1=1, axis2=2)


def _sine_product(dim: int) -> ManufacturedSolution:
    u = make_field("trig-product", dim)
    return ManufacturedSolution("sine-product", u, lambda x: dim * math.pi**2 * u.value(x))


def _quadratic_bubble(dim: int) -> ManufacturedSolution:
    """u = Π x_i (1 - x_i), expanded into monomials."""

    terms = []
    for squared in range(2**dim):
        exponent = [2 if squared >> i & 1 else 1 for i in range(dim)]
        terms.append(((-1.0) ** bin(squared).count("1"), exponent))
    u = polynomial_field(dim, terms, name="quadratic-bubble")
    return ManufacturedSolution("quadratic-bubble", u, _negative_laplacian(u))


def _affine(dim: int) -> ManufacturedSolution:
    u = make_field("affine", dim, a=[float(i + 1) for i in range(dim)], b=1.0)
    return ManufacturedSolution("affine", u, lambda x: np.zeros(len(x)), homogeneous=False)


_MMS: Dict[str, Callable[[int], ManufacturedSolution]] = {}


def register_mms(name: str, factory: Callable[[int], ManufacturedSolution]) -> None:
    if name in _MMS:
        raise FieldError(f"manufactured case '{name}' is already registered")
    _MMS[name] = factory


def list_mms() -> List[str]:
    return sorted(_MMS)


def make_mms(name: str, dim: int) -> ManufacturedSolution:
    try:
        return _MMS[name](dim)
    except KeyError as exc:
        raise FieldError(f"unknown manufactured case '{name}' (known: {', '.join(list_mms())})") from exc


register_mms("sine-product", _sine_product)
register_mms("quadratic-bubble", _quadratic_bubble)
register_mms("affine", _affine)


# ---------------------------------------------------------------------------
# problem, system, solution


@dataclass(frozen=True, eq=False)
class PoissonProblem:
    mesh: SimplicialMesh
    forcing: Callable[[np.ndarray], np.ndarray]
    exact: Optional[AnalyticField] = None
    name: str = "custom"

    @classmethod
    def from_mms(cls, mesh: SimplicialMesh, case: str) -> "PoissonProblem":
        mms = make_mms(case, mesh.dim)
        return cls(mesh=mesh, forcing=mms.forcing, exact=mms.exact, name=mms.name)

    def boundary_values(self, points: np.ndarray) -> np.ndarray:
        if self.exact is None:
            return np.zeros(len(points))
        return np.asarray(self.exact.value(points), dtype=float)


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """Full stiffness/load plus the reduced SPD system on interior vertices."""

    problem: PoissonProblem
    stiffness: csr_matrix
    load: np.ndarray
    matrix: csr_matrix
    rhs: np.ndarray
    interior: np.ndarray
    boundary: np.ndarray
    boundary_values: np.ndarray
    gradients: np.ndarray
    volumes: np.ndarray

    @property
    def size(self) -> int:
        return int(self.interior.shape[0])

    def expand(self, interior_values: np.ndarray) -> np.ndarray:
        """Nodal vector on all vertices from interior values plus the boundary data."""

        full = np.zeros(self.problem.mesh.n_vertices)
        full[self.interior] = interior_values
        full[self.boundary] = self.boundary_values
        return full


@dataclass(frozen=True, eq=False)
class DiscreteSolution:
    values: np.ndarray
    residual: float
    iterations: int
    system: LinearSystem = field(repr=False)

    def cell_gradients(self) -> np.ndarray:
        """∇u_h on every cell, shape (M, d)."""

        return _cell_gradients(self.system, self.values)


def _cell_gradients(system: LinearSystem, values: np.ndarray) -> np.ndarray:
    cells = system.problem.mesh.cells
    return np.einsum("mj,mjd->md", values[cells], system.gradients)


def _barycentric_gradients(m: SimplicialMesh) -> Tuple[np.ndarray, np.ndarray]:
    _, matrices, jacobians = cell_maps(m)
    inverse = np.linalg.inv(matrices)
    grads = np.empty((m.n_cells, m.dim + 1, m.dim))
    grads[:, 1:, :] = inverse
    grads[:, 0, :] = -inverse.sum(axis=1)
    return grads, jacobians / math.factorial(m.dim)


def assemble(problem: PoissonProblem, *, load_exactness: int = LOAD_EXACTNESS, allow_high_dim: bool = False) -> LinearSystem:
    """Assemble stiffness and load, then eliminate the Dirichlet vertices."""

    m = problem.mesh
    if m.dim < 2:
        raise AssemblyError(f"the Poisson solver needs d >= 2, got {m.dim}")
    if m.dim >= 4 and not allow_high_dim:
        raise AssemblyError(f"d={m.dim} Poisson problems need allow_high_dim=True")
    manifold = validate_manifold(m)
    if not manifold.passed:
        raise AssemblyError(f"mesh is not a valid manifold: {manifold.to_dict()}")
    boundary = m.boundary_vertices()
    interior = m.interior_vertices()
    if len(interior) == 0:
        raise AssemblyError("mesh has no interior vertex; nothing to solve")

    grads, volumes = _barycentric_gradients(m)
    local = np.einsum("mid,mjd->mij", grads, grads) * volumes[:, None, None]
    n = m.n_vertices
    rows = np.repeat(m.cells, m.dim + 1, axis=1).ravel()
    cols = np.tile(m.cells, (1, m.dim + 1)).ravel()
    stiffness = coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()

    rule = quadrature_rule(m.dim, load_exactness, "conical")
    origins, matrices, jacobians = cell_maps(m)
    points = origins[:, None, :] + np.einsum("mij,qj->mqi", matrices, rule.nodes)
    forcing = np.asarray(problem.forcing(points.reshape(-1, m.dim)), dtype=float).reshape(m.n_cells, -1)
    shape = np.hstack([1.0 - rule.nodes.sum(axis=1, keepdims=True), rule.nodes])
    local_load = np.einsum("mq,q,qj->mj", forcing, rule.weights, shape) * jacobians[:, None]
    load = np.zeros(n)
    np.add.at(load, m.cells, local_load)

    g = problem.boundary_values(m.coords[boundary])
    reduced = stiffness[interior][:, interior].tocsr()
    rhs = load[interior] - stiffness[interior][:, boundary] @ g
    _LOGGER.info("Assembled P1 system: %d unknowns, %d boundary vertices", len(interior), len(boundary))
    return LinearSystem(
        problem=problem,
        stiffness=stiffness,
        load=load,
        matrix=reduced,
        rhs=np.asarray(rhs, dtype=float),
        interior=interior,
        boundary=boundary,
        boundary_values=np.asarray(g, dtype=float),
        gradients=grads,
        volumes=volumes,
    )


def solve(system: LinearSystem, tol: float = 1e-10, *, maxiter: Optional[int] = None) -> DiscreteSolution:
    """Diagonally preconditioned conjugate gradients on the reduced system."""

    b = system.rhs
    norm_b = float(np.linalg.norm(b))
    if norm_b == 0.0:
        return DiscreteSolution(system.expand(np.zeros(system.size)), 0.0, 0, system)
    iterations = 0

    def count(_: np.ndarray) -> None:
        nonlocal iterations
        iterations += 1

    preconditioner = diags(1.0 / system.matrix.diagonal())
    limit = maxiter if maxiter is not None else max(10 * system.size, 100)
    x, info = cg(system.matrix, b, rtol=tol, atol=0.0, maxiter=limit, M=preconditioner, callback=count)
    residual = float(np.linalg.norm(b - system.matrix @ x)) / norm_b
    if info != 0:
        raise SolverError(f"conjugate gradients did not converge in {limit} iterations (residual {residual:.3e})")
    _LOGGER.debug("CG converged in %d iterations, relative residual %.3e", iterations, residual)
    return DiscreteSolution(system.expand(x), residual, iterations, system)


def energy_functional(values: np.ndarray, system: LinearSystem) -> float:
    """J(v_h) = a_h(v_h, v_h) - 2 L_h(v_h) for a nodal vector (interior-only vectors get the boundary data)."""

    values = np.asarray(values, dtype=float)
    if values.shape == (system.size,):
        values = system.expand(values)
    if values.shape != (system.problem.mesh.n_vertices,):
        raise AssemblyError(f"nodal vector has shape {values.shape}, expected ({system.problem.mesh.n_vertices},)")
    return float(values @ (system.stiffness @ values) - 2.0 * system.load @ values)


# ---------------------------------------------------------------------------
# errors and bounds


def _exact(system: LinearSystem) -> AnalyticField:
    exact = system.problem.exact
    if exact is None:
        raise FieldError("this operation needs the exact solution")
    return exact


def _gradient_rule(exact: AnalyticField, dim: int) -> QuadratureRule:
    degree = None if exact.polynomial_degree is None else max(exact.polynomial_degree - 1, 0)
    return norm_rule(dim, degree, 2)


def _gradient_misfit(system: LinearSystem, values: np.ndarray, rule: Optional[QuadratureRule]) -> float:
    exact = _exact(system)
    m = system.problem.mesh
    grads = _cell_gradients(system, values)

    def misfit(points: np.ndarray, xi: np.ndarray) -> np.ndarray:
        cells, count, dim = points.shape
        return exact.gradient(points.reshape(-1, dim)).reshape(cells, count, dim) - grads[:, None, :]

    return lp_norm(cellwise(misfit), m, 2.0, rule or _gradient_rule(exact, m.dim))


def gradient_error(system: LinearSystem, solution: DiscreteSolution, rule: Optional[QuadratureRule] = None) -> float:
    """‖∇(u - u_h)‖_{L2(Ω)}."""

    return _gradient_misfit(system, solution.values, rule)


def interpolation_gradient_error(system: LinearSystem, rule: Optional[QuadratureRule] = None) -> float:
    """‖∇(u - I_h u)‖_{L2(Ω)} for the P1 nodal interpolant."""

    exact = _exact(system)
    return _gradient_misfit(system, exact.value(system.problem.mesh.coords), rule)


def approximation_bounds(
    system: LinearSystem,
    solution: DiscreteSolution,
    c_int: float,
    *,
    report: Optional[QualityReport] = None,
) -> Tuple[BoundCheckResult, BoundCheckResult, BoundCheckResult]:
    """The Cea step and both gradient-approximation bounds."""

    exact = _exact(system)
    m = system.problem.mesh
    report = report if report is not None else quality_report(m)
    error = gradient_error(system, solution)
    interp_error = interpolation_gradient_error(system)
    grad_norm = lp_norm(exact.gradient, m, 2.0, _gradient_rule(exact, m.dim))
    hess_degree = None if exact.polynomial_degree is None else max(exact.polynomial_degree - 2, 0)
    hess_norm = lp_norm(exact.hessian, m, 2.0, norm_rule(m.dim, hess_degree, 2))
    atol = RESIDUAL_ATOL * grad_norm

    cea = BoundCheckResult(
        "fem.cea",
        error,
        interp_error,
        {"case": system.problem.name},
        rtol=CEA_RTOL,
        atol=atol,
    )
    first = BoundCheckResult(
        "thm.fem_grad",
        error,
        c_int * report.c_sigma * grad_norm,
        {"c_int": float(c_int), "C_sigma": report.c_sigma, "grad_norm": grad_norm},
        atol=atol,
    )
    second = BoundCheckResult(
        "thm.fem_hessian",
        error,
        2.0 * c_int * report.c_sigma * report.r_max * hess_norm,
        {"c_int": float(c_int), "C_sigma": report.c_sigma, "R_max": report.r_max, "hessian_norm": hess_norm},
        atol=atol,
    )
    return cea, first, second


def galerkin_residual(
    system: LinearSystem,
    solution: DiscreteSolution,
    w_h: np.ndarray,
    rule: Optional[QuadratureRule] = None,
) -> float:
    """a_h(u - u_h, w_h) for a discrete w_h vanishing on the boundary."""

    exact = _exact(system)
    m = system.problem.mesh
    w = np.asarray(w_h, dtype=float)
    if w.shape == (system.size,):
        full = np.zeros(m.n_vertices)
        full[system.interior] = w
        w = full
    if np.any(w[system.boundary] != 0.0):
        raise AssemblyError("w_h must vanish on the boundary")
    w_grads = _cell_gradients(system, w)

    def flux(points: np.ndarray, xi: np.ndarray) -> np.ndarray:
        cells, count, dim = points.shape
        grad_u = exact.gradient(points.reshape(-1, dim)).reshape(cells, count, dim)
        return np.einsum("mqd,md->mq", grad_u, w_grads)

    continuous = integrate_cellwise(cellwise(flux), m, rule or _gradient_rule(exact, m.dim))
    discrete = float(solution.values @ (system.stiffness @ w))
    return continuous - discrete


def energy_error_identity(system: LinearSystem, solution: DiscreteSolution, rule: Optional[QuadratureRule] = None) -> Tuple[float, float]:
    """(‖∇(u - u_h)‖², ‖∇u‖² + J(u_h)); equal up to load quadrature for homogeneous data."""

    exact = _exact(system)
    m = system.problem.mesh
    rule = rule or _gradient_rule(exact, m.dim)
    lhs = gradient_error(system, solution, rule) ** 2
    rhs = lp_norm(exact.gradient, m, 2.0, rule) ** 2 + energy_functional(solution.values, system)
    return lhs, rhs


def run_record(system: LinearSystem, solution: DiscreteSolution) -> Dict[str, object]:
    """JSON-ready summary of one solve."""

    record: Dict[str, object] = {
        "case": system.problem.name,
        "dim": system.problem.mesh.dim,
        "n_vertices": system.problem.mesh.n_vertices,
        "n_cells": system.problem.mesh.n_cells,
        "unknowns": system.size,
        "iterations": solution.iterations,
        "residual": solution.residual,
        "energy": energy_functional(solution.values, system),
    }
    if system.problem.exact is not None:
        record["gradient_error"] = gradient_error(system, solution)
    return record
