"""Observed convergence orders under uniform refinement."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from scipy.stats import linregress

from pdmesh.analysis.fem import PoissonProblem, assemble, gradient_error, solve
from pdmesh.analysis.functionals import norm_rule
from pdmesh.core.mesh import SimplicialMesh
from pdmesh.errors import ExperimentError
from pdmesh.interp.fields import AnalyticField, gradient_field
from pdmesh.interp.interpolation import difference, interpolate_global, lp_norm
from pdmesh.utils.logging_utils import get_logger
from pdmesh.utils.parallel import parallel_map

from .experiment import ExperimentConfig, build_field, derive_seed
from .families import structured_grid

__all__ = [
    "EXACT_FLOOR",
    "MIN_ORDER",
    "ORDER_SLACK",
    "expected_order",
    "ConvergenceRow",
    "ConvergenceTable",
    "fit_order",
    "mesh_size",
    "interpolation_errors",
    "fem_errors",
    "convergence_study",
]

_LOGGER = get_logger("Convergence")

EXACT_FLOOR = 1e-10
MIN_ORDER = 0.9
ORDER_SLACK = 0.1


def expected_order(quantity: str, k: int) -> Tuple[float, float]:
    """Accepted slope interval for a quantity measured with degree-k elements.

    FEM gradient errors must sit at first order (no more, no less); gradient
    interpolation errors converge at k + 1 with no upper bound.
    """

    if quantity == "fem_gradient_l2":
        return MIN_ORDER, 1.0 + ORDER_SLACK
    if quantity == "interp_gradient_l2":
        return k + 1.0 - ORDER_SLACK, math.inf
    return MIN_ORDER, math.inf


def fit_order(h: Sequence[float], errors: Sequence[float]) -> Tuple[float, float]:
    """Least-squares slope of log(error) against log(h), with R²."""

    if len(h) < 3:
        raise ExperimentError(f"an order fit needs at least 3 levels, got {len(h)}")
    fit = linregress(np.log(np.asarray(h, dtype=float)), np.log(np.asarray(errors, dtype=float)))
    return float(fit.slope), float(fit.rvalue**2)


def mesh_size(m: SimplicialMesh) -> float:
    """Longest edge."""

    verts = m.cell_coords()
    longest = 0.0
    for i in range(m.dim + 1):
        for j in range(i + 1, m.dim + 1):
            longest = max(longest, float(np.linalg.norm(verts[:, i] - verts[:, j], axis=1).max()))
    return longest


@dataclass(frozen=True)
class ConvergenceRow:
    quantity: str
    label: str
    dim: int
    k: int
    levels: Tuple[int, ...]
    h: Tuple[float, ...]
    errors: Tuple[float, ...]
    slope: float
    r2: float
    exact: bool

    @property
    def passed(self) -> bool:
        if self.exact:
            return True
        low, high = expected_order(self.quantity, self.k)
        return low <= self.slope <= high

    def to_dict(self) -> Dict[str, Any]:
        return {
            "quantity": self.quantity,
            "label": self.label,
            "dim": self.dim,
            "k": self.k,
            "levels": list(self.levels),
            "h": list(self.h),
            "errors": list(self.errors),
            "slope": self.slope,
            "r2": self.r2,
            "exact": self.exact,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class ConvergenceTable:
    rows: Tuple[ConvergenceRow, ...]

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def to_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "rows": [row.to_dict() for row in self.rows]}


def _row(quantity: str, label: str, dim: int, k: int, levels: Sequence[int], h: List[float], errors: List[float], scale: float) -> ConvergenceRow:
    exact = all(error <= EXACT_FLOOR * max(scale, 1.0) for error in errors)
    slope, r2 = (math.nan, math.nan) if exact else fit_order(h, errors)
    return ConvergenceRow(quantity, label, dim, k, tuple(int(n) for n in levels), tuple(h), tuple(errors), slope, r2, exact)


def interpolation_errors(v: AnalyticField, dim: int, k: int, levels: Sequence[int]) -> ConvergenceRow:
    """‖w - I_h w‖_{L2} with w = ∇v (or v itself for a vector field) on Kuhn grids."""

    w = v if v.is_vector else gradient_field(v)
    degree = None if w.polynomial_degree is None else max(w.polynomial_degree, k)
    rule = norm_rule(dim, degree, 2.0)
    h: List[float] = []
    errors: List[float] = []
    scale = 0.0
    for n in levels:
        mesh = structured_grid(dim, int(n))
        h.append(mesh_size(mesh))
        errors.append(lp_norm(difference(w, interpolate_global(w, mesh, k)), mesh, 2.0, rule))
        scale = max(scale, lp_norm(w, mesh, 2.0, rule))
    return _row("interp_gradient_l2", v.name, dim, k, levels, h, errors, scale)


def fem_errors(case: str, dim: int, levels: Sequence[int], *, allow_high_dim: bool = False) -> ConvergenceRow:
    """‖∇(u - u_h)‖_{L2} for a manufactured case on Kuhn grids."""

    h: List[float] = []
    errors: List[float] = []
    scale = 0.0
    for n in levels:
        mesh = structured_grid(dim, int(n))
        system = assemble(PoissonProblem.from_mms(mesh, case), allow_high_dim=allow_high_dim)
        solution = solve(system)
        h.append(mesh_size(mesh))
        errors.append(gradient_error(system, solution))
        exact = system.problem.exact
        scale = max(scale, lp_norm(exact.gradient, mesh, 2.0) if exact is not None else 0.0)
    return _row("fem_gradient_l2", case, dim, 1, levels, h, errors, scale)


def convergence_study(config: ExperimentConfig) -> ConvergenceTable:
    """Slopes for interpolation of every configured field and every FEM case."""

    if len(config.levels) < 3 or len(config.fem_levels) < 3:
        raise ExperimentError("convergence studies need at least 3 refinement levels")
    tasks: List[Tuple[str, Any]] = []
    for dim in config.dims:
        for index, spec in enumerate(config.fields):
            for k in config.degrees:
                tasks.append(("interp", (spec, dim, k, index)))
    for dim in config.fem_dims:
        for case in config.fem_cases:
            tasks.append(("fem", (case, dim)))

    def run(task: Tuple[str, Any]) -> ConvergenceRow:
        kind, args = task
        if kind == "interp":
            spec, dim, k, index = args
            field_ = build_field(spec, dim, seed=derive_seed(config.seed, index))
            return interpolation_errors(field_, dim, k, config.levels)
        case, dim = args
        return fem_errors(case, dim, config.fem_levels, allow_high_dim=config.allow_high_dim_fem)

    rows = tuple(parallel_map(run, tasks))
    for row in rows:
        _LOGGER.info("%s %s d=%d k=%d: slope=%.4f R2=%.4f exact=%s", row.quantity, row.label, row.dim, row.k, row.slope, row.r2, row.exact)
    return ConvergenceTable(rows=rows)
