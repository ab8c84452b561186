"""Element-wise Lagrange interpolation, mapped quadrature and L_p norms over a mesh.

Integrands are *cell evaluators*: callables taking the mapped quadrature
points of every cell, shape (M, Q, d), plus the reference nodes (Q, d), and
returning values of shape (M, Q) or (M, Q, ...). Analytic fields, plain
callables of points and global interpolants all convert to that form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Optional, Tuple, Union

import numpy as np

from pdmesh.core.geometry import DEGENERATE_VOLUME, Simplex
from pdmesh.core.mesh import SimplicialMesh, locate_points
from pdmesh.errors import DegenerateSimplexError, DimensionMismatchError, InterpolationError
from pdmesh.utils.logging_utils import get_logger

from .fields import AnalyticField
from .quadrature import QuadratureRule, quadrature_rule
from .reference import AffineMap, ReferenceBasis, reference_basis, reference_nodes

__all__ = [
    "CellEvaluator",
    "DEFAULT_NORM_EXACTNESS",
    "LocalInterpolant",
    "GlobalInterpolant",
    "default_rule",
    "cell_maps",
    "map_points",
    "cell_evaluator",
    "cellwise",
    "difference",
    "interpolate_local",
    "interpolate_global",
    "integrate",
    "integrate_cellwise",
    "lp_norm",
]

_LOGGER = get_logger("Interpolation")

DEFAULT_NORM_EXACTNESS = 8
SUP_SAMPLE_DEGREE = 4

CellEvaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]
Integrand = Union[CellEvaluator, AnalyticField, "GlobalInterpolant", Callable[[np.ndarray], np.ndarray]]


def default_rule(dim: int, exactness: int = DEFAULT_NORM_EXACTNESS) -> QuadratureRule:
    """Positive-weight rule used for norms and functionals."""

    return quadrature_rule(dim, exactness, "conical")


def cell_maps(m: SimplicialMesh) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(origins (M, d), matrices (M, d, d), |det| (M,)) of the affine maps of every cell."""

    verts = m.cell_coords()
    origins = verts[:, 0, :]
    matrices = np.transpose(verts[:, 1:, :] - origins[:, None, :], (0, 2, 1))
    jacobians = np.abs(np.linalg.det(matrices)) if len(verts) else np.zeros(0)
    bad = np.flatnonzero(jacobians <= DEGENERATE_VOLUME)
    if len(bad):
        raise DegenerateSimplexError(f"cell {int(bad[0])} is degenerate")
    return origins, matrices, jacobians


def map_points(m: SimplicialMesh, xi: np.ndarray) -> np.ndarray:
    origins, matrices, _ = cell_maps(m)
    return origins[:, None, :] + np.einsum("mij,qj->mqi", matrices, np.atleast_2d(xi))


def cell_evaluator(obj: Integrand) -> CellEvaluator:
    """Normalise *obj* to a cell evaluator."""

    if isinstance(obj, GlobalInterpolant):
        return obj.evaluate_cells
    if isinstance(obj, AnalyticField):
        pointwise = obj.value
    elif getattr(obj, "is_cell_evaluator", False):
        return obj  # type: ignore[return-value]
    elif callable(obj):
        pointwise = obj
    else:
        raise InterpolationError(f"cannot integrate object of type {type(obj).__name__}")

    def evaluate(points: np.ndarray, xi: np.ndarray) -> np.ndarray:
        cells, count, dim = points.shape
        values = np.asarray(pointwise(points.reshape(-1, dim)), dtype=float)
        return values.reshape((cells, count) + values.shape[1:])

    return evaluate


def cellwise(func: CellEvaluator) -> CellEvaluator:
    """Mark *func(points, xi)* as a cell evaluator so norms do not treat it as pointwise."""

    func.is_cell_evaluator = True  # type: ignore[attr-defined]
    return func


def difference(a: Integrand, b: Integrand) -> CellEvaluator:
    """Cell evaluator of a - b."""

    left, right = cell_evaluator(a), cell_evaluator(b)
    return cellwise(lambda points, xi: left(points, xi) - right(points, xi))


@dataclass(frozen=True, eq=False)
class LocalInterpolant:
    """I_K g on one simplex; coefficients are the nodal values, shape (N_p, ...)."""

    basis: ReferenceBasis
    affine: AffineMap
    coefficients: np.ndarray

    def at_reference(self, xi: np.ndarray) -> np.ndarray:
        return np.tensordot(self.basis.evaluate(xi), self.coefficients, axes=(1, 0))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.at_reference(self.affine.inverse(x))

    def nodes(self) -> np.ndarray:
        return self.affine(self.basis.nodes)


def _values(g: Any, points: np.ndarray) -> np.ndarray:
    fn = g.value if isinstance(g, AnalyticField) else g
    return np.asarray(fn(points), dtype=float)


def interpolate_local(g: Any, s: Simplex, basis: ReferenceBasis) -> LocalInterpolant:
    """Nodal interpolant of *g* on *s*; exact on polynomials of degree <= basis.degree."""

    if s.dim != basis.dim:
        raise DimensionMismatchError(f"simplex in R^{s.dim}, basis on the {basis.dim}-simplex")
    affine = AffineMap.from_simplex(s)
    coefficients = _values(g, affine(basis.nodes))
    return LocalInterpolant(basis=basis, affine=affine, coefficients=coefficients)


class GlobalInterpolant:
    """Piecewise polynomial I_h g; coefficients have shape (M, N_p, ...)."""

    def __init__(self, mesh: SimplicialMesh, basis: ReferenceBasis, coefficients: np.ndarray) -> None:
        self.mesh = mesh
        self.basis = basis
        self.coefficients = coefficients

    @property
    def value_shape(self) -> Tuple[int, ...]:
        return tuple(self.coefficients.shape[2:])

    def local(self, cell: int) -> LocalInterpolant:
        return LocalInterpolant(
            basis=self.basis,
            affine=AffineMap.from_simplex(self.mesh.simplex(cell)),
            coefficients=self.coefficients[cell],
        )

    def evaluate_cells(self, points: np.ndarray, xi: np.ndarray) -> np.ndarray:
        return np.tensordot(self.basis.evaluate(xi), self.coefficients, axes=(1, 1)).swapaxes(0, 1)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Evaluate at physical points (first containing cell wins on shared facets)."""

        x = np.atleast_2d(np.asarray(x, dtype=float))
        cells = locate_points(self.mesh, x)
        if np.any(cells < 0):
            raise InterpolationError(f"point {x[int(np.flatnonzero(cells < 0)[0])].tolist()} is outside the mesh")
        out = np.empty((len(x),) + self.value_shape)
        for i, cell in enumerate(cells):
            out[i] = self.local(int(cell))(x[i : i + 1])[0]
        return out


def interpolate_global(g: Any, m: SimplicialMesh, k: int) -> GlobalInterpolant:
    """Element-wise interpolation of *g* (scalar or vector, component-wise) with degree *k*."""

    basis = reference_basis(m.dim, k)
    nodes = map_points(m, basis.nodes)
    coefficients = cell_evaluator(g)(nodes, basis.nodes)
    _LOGGER.debug("Interpolated on %d cells with k=%d (N_p=%d)", m.n_cells, k, basis.size)
    return GlobalInterpolant(m, basis, np.asarray(coefficients, dtype=float))


def integrate_cellwise(func: CellEvaluator, m: SimplicialMesh, rule: Optional[QuadratureRule] = None) -> float:
    """Σ_K Σ_q w_q |det A_K| f_K(x_q) for a scalar cell evaluator."""

    rule = rule or default_rule(m.dim)
    if rule.dim != m.dim:
        raise DimensionMismatchError(f"rule dimension {rule.dim} does not match mesh dimension {m.dim}")
    if m.n_cells == 0:
        return 0.0
    origins, matrices, jacobians = cell_maps(m)
    points = origins[:, None, :] + np.einsum("mij,qj->mqi", matrices, rule.nodes)
    values = np.asarray(func(points, rule.nodes), dtype=float)
    if values.shape != points.shape[:2]:
        raise InterpolationError(f"integrand must be scalar per point, got shape {values.shape[2:]}")
    per_cell = values @ rule.weights
    return float(np.sum(per_cell * jacobians))


def integrate(func: Integrand, m: SimplicialMesh, rule: Optional[QuadratureRule] = None) -> float:
    """∫_Ω f over the union of cells."""

    return integrate_cellwise(cell_evaluator(func), m, rule)


def lp_norm(func: Integrand, m: SimplicialMesh, p: float, rule: Optional[QuadratureRule] = None) -> float:
    """Entry-wise L_p norm (Σ over components of |f_i|^p, then integrated); p = inf samples a sup."""

    p = float(p)
    if not p >= 1.0:
        raise InterpolationError(f"L_p norms need p >= 1, got {p}")
    evaluate = cell_evaluator(func)
    rule = rule or default_rule(m.dim)
    if math.isinf(p):
        if m.n_cells == 0:
            return 0.0
        xi = np.vstack([rule.nodes, reference_nodes(m.dim, SUP_SAMPLE_DEGREE)])
        values = np.asarray(evaluate(map_points(m, xi), xi), dtype=float)
        return float(np.max(np.abs(values))) if values.size else 0.0

    def integrand(points: np.ndarray, xi: np.ndarray) -> np.ndarray:
        values = np.abs(np.asarray(evaluate(points, xi), dtype=float))
        return np.sum((values ** p).reshape(points.shape[0], points.shape[1], -1), axis=2)

    total = integrate_cellwise(integrand, m, rule)
    return max(total, 0.0) ** (1.0 / p)
