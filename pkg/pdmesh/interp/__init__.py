"""Reference Lagrange bases, quadrature, analytic fields and mesh interpolation."""

from .fields import AnalyticField, gradient_field, list_fields, make_field, random_polynomial, register_field
from .interpolation import (
    GlobalInterpolant,
    LocalInterpolant,
    cell_evaluator,
    cellwise,
    default_rule,
    difference,
    integrate,
    integrate_cellwise,
    interpolate_global,
    interpolate_local,
    lp_norm,
)
from .quadrature import QuadratureRule, monomial_integral, quadrature_rule
from .reference import AffineMap, ReferenceBasis, reference_basis

__all__ = [
    "AffineMap",
    "AnalyticField",
    "GlobalInterpolant",
    "LocalInterpolant",
    "QuadratureRule",
    "ReferenceBasis",
    "cell_evaluator",
    "cellwise",
    "default_rule",
    "difference",
    "gradient_field",
    "integrate",
    "integrate_cellwise",
    "interpolate_global",
    "interpolate_local",
    "list_fields",
    "lp_norm",
    "make_field",
    "monomial_integral",
    "quadrature_rule",
    "random_polynomial",
    "reference_basis",
    "register_field",
]
