"""The roughness functional Ψ, Sobolev-type norms and evaluators for every a-priori bound.

Each bound evaluator returns a :class:`BoundCheckResult` carrying both sides
of the inequality and the constants used to build the right-hand side. Bounds
that contain the interpolation constant ``c_int`` scale linearly in it, so
``lhs / (rhs / c_int)`` is the smallest constant that makes the check pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, Mapping, Optional, Tuple

import numpy as np

from pdmesh.core.geometry import circumspheres, insphere_diameter, min_containment_ball
from pdmesh.core.mesh import SimplicialMesh
from pdmesh.core.quality import QualityReport, quality_report, theta_upper_bound
from pdmesh.errors import BoundError, DimensionMismatchError, FieldError
from pdmesh.interp.fields import AnalyticField, gradient_field
from pdmesh.interp.interpolation import (
    DEFAULT_NORM_EXACTNESS,
    cell_evaluator,
    cellwise,
    default_rule,
    difference,
    integrate_cellwise,
    interpolate_global,
    lp_norm,
)
from pdmesh.interp.quadrature import MAX_EXACTNESS, QuadratureRule
from pdmesh.utils.logging_utils import get_logger

__all__ = [
    "LENGTH_SCALES",
    "BoundConstants",
    "BoundCheckResult",
    "c_d",
    "c_rho",
    "norm_rule",
    "roughness",
    "gradient_norm",
    "hessian_norm",
    "w1_norm",
    "h1_seminorm",
    "equivalence_bounds",
    "lemma2_bound",
    "interp_bound_l2",
    "interp_bound_llambda",
    "vector_bounds",
    "theta_bound_check",
    "thickness_bound_check",
    "regularity_bound_check",
    "empirical_constant",
]

_LOGGER = get_logger("Functionals")

LENGTH_SCALES = ("delta", "rho", "r_min", "circumdiameter")
DEFAULT_RTOL = 1e-9
RESIDUAL_ATOL = 1e-10


def c_d(d: int) -> float:
    """sqrt(d (d+1) / 2)."""

    return math.sqrt(d * (d + 1) / 2.0)


def c_rho(d: int, rho: float) -> float:
    """sqrt(d (2(d+1))^{1/ϱ}); the ϱ = ∞ limit is sqrt(d)."""

    rho = float(rho)
    if not rho > 1.0:
        raise BoundError(f"the exponent ϱ must exceed 1, got {rho}")
    if math.isinf(rho):
        return math.sqrt(d)
    return math.sqrt(d * (2.0 * (d + 1)) ** (1.0 / rho))


def _rho_exponents(rho: float) -> Tuple[float, float]:
    """((ϱ-1)/2ϱ, 1/ϱ) with their ϱ → ∞ limits."""

    if math.isinf(rho):
        return 0.5, 0.0
    return (rho - 1.0) / (2.0 * rho), 1.0 / rho


@dataclass(frozen=True)
class BoundConstants:
    dim: int
    c_int: float = 1.0
    rho_exponent: float = 2.0
    lam: float = 2.0

    def __post_init__(self) -> None:
        if not self.rho_exponent > 1.0:
            raise BoundError(f"ϱ must lie in (1, inf], got {self.rho_exponent}")
        if not self.lam >= 1.0:
            raise BoundError(f"λ must lie in [1, inf], got {self.lam}")
        if not self.c_int > 0.0:
            raise BoundError(f"c_int must be positive, got {self.c_int}")

    @property
    def c_d(self) -> float:
        return c_d(self.dim)

    @property
    def c_rho(self) -> float:
        return c_rho(self.dim, self.rho_exponent)

    def to_dict(self) -> Dict[str, float]:
        return {
            "dim": self.dim,
            "c_int": self.c_int,
            "rho": self.rho_exponent,
            "lambda": self.lam,
            "c_d": self.c_d,
            "c_rho": self.c_rho,
        }


@dataclass(frozen=True)
class BoundCheckResult:
    """lhs <= rhs (1 + rtol) + atol."""

    name: str
    lhs: float
    rhs: float
    constants: Mapping[str, Any] = field(default_factory=dict)
    rtol: float = DEFAULT_RTOL
    atol: float = 0.0
    note: str = ""

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return bool(self.lhs <= self.rhs * (1.0 + self.rtol) + self.atol)

    @property
    def c_int(self) -> Optional[float]:
        value = self.constants.get("c_int")
        return None if value is None else float(value)

    def with_c_int(self, c_int: float) -> "BoundCheckResult":
        """Same check with the right-hand side rescaled to another interpolation constant."""

        current = self.c_int
        if current is None:
            raise BoundError(f"check '{self.name}' does not depend on c_int")
        constants = dict(self.constants)
        constants["c_int"] = float(c_int)
        factor = float(c_int) / current
        return replace(self, rhs=self.rhs * factor, constants=constants)

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "constants": dict(self.constants),
            "slack": self.slack,
            "pass": self.passed,
        }
        if self.note:
            payload["note"] = self.note
        return payload


def empirical_constant(result: BoundCheckResult) -> float:
    """Smallest c_int for which *result* would pass (0 when the left side vanishes)."""

    c_int = result.c_int
    if c_int is None:
        raise BoundError(f"check '{result.name}' does not depend on c_int")
    unit_rhs = result.rhs / c_int
    if result.lhs <= result.atol:
        return 0.0
    if unit_rhs <= 0.0:
        return math.inf
    return result.lhs / unit_rhs


# ---------------------------------------------------------------------------
# quadrature choice


def norm_rule(dim: int, degree: Optional[int], p: float) -> QuadratureRule:
    """Conical rule exact for |w|^p when w is a polynomial of *degree* and p an even integer."""

    if degree is not None and not math.isinf(p) and float(p).is_integer() and int(p) % 2 == 0:
        exactness = max(1, min(int(degree) * int(p), MAX_EXACTNESS["conical"]))
        return default_rule(dim, exactness)
    return default_rule(dim, DEFAULT_NORM_EXACTNESS)


def _vector_of(v: AnalyticField) -> AnalyticField:
    """w = ∇v for a scalar field, w = f for a vector field."""

    return v if v.is_vector else gradient_field(v)


def _check_dim(v: AnalyticField, m: SimplicialMesh) -> None:
    if v.dim != m.dim:
        raise DimensionMismatchError(f"field '{v.name}' lives in R^{v.dim}, mesh in R^{m.dim}")


# ---------------------------------------------------------------------------
# roughness functional


def _length_scales(m: SimplicialMesh, length_scale: str) -> np.ndarray:
    if length_scale == "delta":
        verts = m.cell_coords()
        gaps = verts[:, :, None, :] - verts[:, None, :, :]
        return np.sqrt(np.max(np.sum(gaps**2, axis=3), axis=(1, 2)))
    if length_scale == "rho":
        return np.array([insphere_diameter(s) for s in m.simplices()])
    if length_scale == "r_min":
        return np.array([2.0 * min_containment_ball(s).radius for s in m.simplices()])
    if length_scale == "circumdiameter":
        return 2.0 * circumspheres(m.coords, m.cells)[1]
    raise BoundError(f"unknown length scale '{length_scale}' (expected one of {LENGTH_SCALES})")


def roughness(
    w: Any,
    m: SimplicialMesh,
    rule: Optional[QuadratureRule] = None,
    *,
    length_scale: str = "delta",
) -> float:
    """Ψ(w) = [Σ_K h_K^{-2} ∫_K Σ_{i>j} (abs(w)·abs(p_{K,ij}))² dV]^{1/2}."""

    if isinstance(w, AnalyticField):
        _check_dim(w, m)
        if not w.is_vector:
            raise FieldError("roughness takes a vector field; use gradient_field(v) for ∇v")
        if rule is None:
            rule = norm_rule(m.dim, w.polynomial_degree, 2)
    rule = rule or default_rule(m.dim, 7)
    evaluate = cell_evaluator(w)
    verts = m.cell_coords()
    i, j = np.triu_indices(m.dim + 1, k=1)
    edges = np.abs(verts[:, j, :] - verts[:, i, :])
    inv_h2 = 1.0 / _length_scales(m, length_scale) ** 2

    def integrand(points: np.ndarray, xi: np.ndarray) -> np.ndarray:
        values = np.abs(np.asarray(evaluate(points, xi), dtype=float))
        if values.ndim != 3 or values.shape[2] != m.dim:
            raise DimensionMismatchError(f"roughness needs a field with {m.dim} components")
        dots = np.einsum("mqd,med->mqe", values, edges)
        return np.sum(dots**2, axis=2) * inv_h2[:, None]

    return math.sqrt(max(integrate_cellwise(cellwise(integrand), m, rule), 0.0))


# ---------------------------------------------------------------------------
# norms


def gradient_norm(v: AnalyticField, m: SimplicialMesh, rho: float = 2.0, rule: Optional[QuadratureRule] = None) -> float:
    """‖∇v‖_{L_ϱ(Ω)} (entry-wise; the Jacobian for a vector field)."""

    _check_dim(v, m)
    degree = None if v.polynomial_degree is None else max(v.polynomial_degree - 1, 0)
    return lp_norm(v.gradient, m, rho, rule or norm_rule(m.dim, degree, rho))


def hessian_norm(v: AnalyticField, m: SimplicialMesh, rho: float = 2.0, rule: Optional[QuadratureRule] = None) -> float:
    """‖∇(∇v)‖_{L_ϱ(Ω)} with the entry-wise matrix norm."""

    _check_dim(v, m)
    degree = None if v.polynomial_degree is None else max(v.polynomial_degree - 2, 0)
    return lp_norm(v.hessian, m, rho, rule or norm_rule(m.dim, degree, rho))


def w1_norm(v: AnalyticField, m: SimplicialMesh, rho: float = 2.0, rule: Optional[QuadratureRule] = None) -> float:
    """(‖v‖^ϱ + ‖∇v‖^ϱ)^{1/ϱ}; the larger of the two for ϱ = ∞."""

    _check_dim(v, m)
    value = lp_norm(v.value, m, rho, rule or norm_rule(m.dim, v.polynomial_degree, rho))
    grad = gradient_norm(v, m, rho, rule)
    if math.isinf(rho):
        return max(value, grad)
    return (value**rho + grad**rho) ** (1.0 / rho)


def h1_seminorm(v: AnalyticField, m: SimplicialMesh, rule: Optional[QuadratureRule] = None) -> float:
    return gradient_norm(v, m, 2.0, rule)


# ---------------------------------------------------------------------------
# bound evaluators


def _report(m: SimplicialMesh, report: Optional[QualityReport]) -> QualityReport:
    return report if report is not None else quality_report(m)


def equivalence_bounds(
    v: AnalyticField,
    m: SimplicialMesh,
    *,
    report: Optional[QualityReport] = None,
) -> Tuple[BoundCheckResult, BoundCheckResult]:
    """C_d C_Ξ ‖w‖_{L2} <= Ψ(w) <= C_Υ ‖w‖_{L2} with w = ∇v (or w = f for a vector field)."""

    _check_dim(v, m)
    report = _report(m, report)
    w = _vector_of(v)
    psi = roughness(w, m)
    norm = lp_norm(w, m, 2.0, norm_rule(m.dim, w.polynomial_degree, 2))
    constants = {"C_d": c_d(m.dim), "C_Xi": report.c_xi, "C_Upsilon": report.c_upsilon, "norm_L2": norm, "Psi": psi}
    atol = RESIDUAL_ATOL * norm * report.c_upsilon
    lower = BoundCheckResult("lemma1.lower", c_d(m.dim) * report.c_xi * norm, psi, constants, atol=atol)
    upper = BoundCheckResult("lemma1.upper", psi, report.c_upsilon * norm, constants, atol=atol)
    return lower, upper


def lemma2_bound(
    v: AnalyticField,
    m: SimplicialMesh,
    rho: float,
    *,
    report: Optional[QualityReport] = None,
) -> BoundCheckResult:
    """Ψ(w) <= C_ϱ Θ^{(ϱ-1)/2ϱ} (R_max^{1/ϱ} / min Δ) ‖w‖_{L_{2ϱ}}."""

    _check_dim(v, m)
    constant = c_rho(m.dim, rho)
    report = _report(m, report)
    w = _vector_of(v)
    theta_power, radius_power = _rho_exponents(float(rho))
    norm = lp_norm(w, m, 2.0 * float(rho), norm_rule(m.dim, w.polynomial_degree, 2.0 * float(rho)))
    psi = roughness(w, m)
    rhs = constant * report.theta**theta_power * (report.r_max**radius_power / report.min_delta) * norm
    constants = {
        "C_rho": constant,
        "rho": float(rho),
        "Theta": report.theta,
        "R_max": report.r_max,
        "min_Delta": report.min_delta,
        "norm_L2rho": norm,
    }
    return BoundCheckResult("lemma2", psi, rhs, constants, atol=RESIDUAL_ATOL * rhs)


def _interpolation_residual(w: AnalyticField, m: SimplicialMesh, k: int, p: float) -> Tuple[float, float]:
    """(‖w - I_h w‖_{L_p}, ‖w‖_{L_p})."""

    interpolant = interpolate_global(w, m, k)
    degree = None if w.polynomial_degree is None else max(w.polynomial_degree, k)
    rule = norm_rule(m.dim, degree, p)
    residual = lp_norm(difference(w, interpolant), m, p, rule)
    scale = lp_norm(w, m, p, rule)
    return residual, scale


def _jacobian_norm(w: AnalyticField, m: SimplicialMesh, p: float) -> float:
    degree = None if w.polynomial_degree is None else max(w.polynomial_degree - 1, 0)
    return lp_norm(w.gradient, m, p, norm_rule(m.dim, degree, p))


def _l2_bound(name: str, w: AnalyticField, m: SimplicialMesh, k: int, rho: float, c_int: float, report: QualityReport) -> BoundCheckResult:
    constant = c_rho(m.dim, rho)
    theta_power, radius_power = _rho_exponents(float(rho))
    residual, scale = _interpolation_residual(w, m, k, 2.0)
    second = _jacobian_norm(w, m, 2.0 * float(rho))
    mesh_factor = report.c_delta * report.r_max**radius_power * report.theta**theta_power / report.c_xi
    rhs = (c_int * constant / c_d(m.dim)) * mesh_factor * second
    constants = {
        "c_int": float(c_int),
        "C_rho": constant,
        "C_d": c_d(m.dim),
        "C_Delta": report.c_delta,
        "C_Xi": report.c_xi,
        "R_max": report.r_max,
        "Theta": report.theta,
        "rho": float(rho),
        "k": int(k),
        "second_derivative_norm": second,
    }
    return BoundCheckResult(name, residual, rhs, constants, atol=RESIDUAL_ATOL * scale)


def _llambda_bound(name: str, w: AnalyticField, m: SimplicialMesh, k: int, lam: float, c_int: float, report: QualityReport) -> BoundCheckResult:
    lam = float(lam)
    if not lam >= 1.0:
        raise BoundError(f"λ must lie in [1, inf], got {lam}")
    residual, scale = _interpolation_residual(w, m, k, lam)
    second = _jacobian_norm(w, m, lam)
    rhs = 2.0 * c_int * report.r_max * second
    constants = {"c_int": float(c_int), "R_max": report.r_max, "lambda": lam, "k": int(k), "second_derivative_norm": second}
    return BoundCheckResult(name, residual, rhs, constants, atol=RESIDUAL_ATOL * scale)


def interp_bound_l2(
    v: AnalyticField,
    m: SimplicialMesh,
    k: int,
    rho: float,
    c_int: float,
    *,
    report: Optional[QualityReport] = None,
) -> BoundCheckResult:
    """‖∇v - I_h(∇v)‖_{L2} <= (c_int C_ϱ / C_d)(C_Δ R_max^{1/ϱ} Θ^{(ϱ-1)/2ϱ} / C_Ξ) ‖∇(∇v)‖_{L_{2ϱ}}."""

    _check_dim(v, m)
    if v.is_vector:
        raise FieldError("interp_bound_l2 takes a scalar field; use vector_bounds for vector fields")
    c_rho(m.dim, rho)
    return _l2_bound("thm.interp_l2", gradient_field(v), m, k, rho, c_int, _report(m, report))


def interp_bound_llambda(
    v: AnalyticField,
    m: SimplicialMesh,
    k: int,
    lam: float,
    c_int: float,
    *,
    report: Optional[QualityReport] = None,
) -> BoundCheckResult:
    """‖∇v - I_h(∇v)‖_{L_λ} <= 2 c_int R_max ‖∇(∇v)‖_{L_λ}."""

    _check_dim(v, m)
    if v.is_vector:
        raise FieldError("interp_bound_llambda takes a scalar field; use vector_bounds for vector fields")
    return _llambda_bound("thm.interp_llambda", gradient_field(v), m, k, lam, c_int, _report(m, report))


def vector_bounds(
    f: AnalyticField,
    m: SimplicialMesh,
    k: int,
    c_int: float,
    *,
    rho: Optional[float] = None,
    lam: Optional[float] = None,
    report: Optional[QualityReport] = None,
) -> BoundCheckResult:
    """The interpolation bounds with f and its Jacobian in place of ∇v and ∇(∇v).

    Exactly one of *rho* (L2 form) and *lam* (L_λ form) selects the bound.
    """

    _check_dim(f, m)
    if not f.is_vector:
        raise FieldError("vector_bounds takes a vector field")
    if (rho is None) == (lam is None):
        raise BoundError("pass exactly one of rho and lam")
    report = _report(m, report)
    if rho is not None:
        c_rho(m.dim, rho)
        return _l2_bound("thm.vector_l2", f, m, k, rho, c_int, report)
    return _llambda_bound("thm.vector_llambda", f, m, k, float(lam), c_int, report)


def theta_bound_check(report: QualityReport) -> BoundCheckResult:
    """Θ <= 2^{d+1}(d+1)/(d-1)! R_max^{d+2} card."""

    bound = theta_upper_bound(report)
    return BoundCheckResult(
        "theta_upper_bound",
        report.theta,
        bound,
        {"R_max": report.r_max, "card": report.card, "dim": report.dim},
    )


def thickness_bound_check(report: QualityReport, delta: float, epsilon: float) -> BoundCheckResult:
    """δ² / (8 d ε²) <= C_Ξ on a δ-protected mesh."""

    lhs = delta**2 / (8.0 * report.dim * epsilon**2) if delta > 0 else 0.0
    note = "" if delta > 0 else "vacuous: mesh is not protected"
    return BoundCheckResult(
        "remark1.thickness",
        lhs,
        report.c_xi,
        {"delta": delta, "epsilon": epsilon, "dim": report.dim},
        note=note,
    )


def regularity_bound_check(report: QualityReport, delta: float, epsilon: float) -> BoundCheckResult:
    """C_σ <= 4 (d+1) ε² / δ² on a δ-protected mesh."""

    if delta > 0:
        rhs = 4.0 * (report.dim + 1) * epsilon**2 / delta**2
        note = ""
    else:
        rhs, note = math.inf, "vacuous: mesh is not protected"
    return BoundCheckResult(
        "remark2.regularity",
        report.c_sigma,
        rhs,
        {"delta": delta, "epsilon": epsilon, "dim": report.dim},
        note=note,
    )
