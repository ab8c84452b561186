"""Roughness functional, a-priori bound evaluators and the P1 Poisson solver."""

from .fem import (
    DiscreteSolution,
    LinearSystem,
    ManufacturedSolution,
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
    register_mms,
    run_record,
    solve,
)
from .functionals import (
    BoundCheckResult,
    BoundConstants,
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
    norm_rule,
    regularity_bound_check,
    roughness,
    theta_bound_check,
    thickness_bound_check,
    vector_bounds,
    w1_norm,
)

__all__ = [
    "BoundCheckResult",
    "BoundConstants",
    "DiscreteSolution",
    "LinearSystem",
    "ManufacturedSolution",
    "PoissonProblem",
    "approximation_bounds",
    "assemble",
    "c_d",
    "c_rho",
    "empirical_constant",
    "energy_error_identity",
    "energy_functional",
    "equivalence_bounds",
    "galerkin_residual",
    "gradient_error",
    "gradient_norm",
    "h1_seminorm",
    "hessian_norm",
    "interp_bound_l2",
    "interp_bound_llambda",
    "interpolation_gradient_error",
    "lemma2_bound",
    "list_mms",
    "make_mms",
    "norm_rule",
    "register_mms",
    "regularity_bound_check",
    "roughness",
    "run_record",
    "solve",
    "theta_bound_check",
    "thickness_bound_check",
    "vector_bounds",
    "w1_norm",
]
