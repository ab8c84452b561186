"""Verification harness: sweeps, calibration, convergence, optimality and protection."""

from .convergence import ConvergenceRow, ConvergenceTable, convergence_study, fit_order
from .experiment import ExperimentConfig, build_field, derive_seed, load_experiment
from .families import MeshFamily, list_families, make_family, register_family, sliver_gadget, structured_grid
from .optimality import OptimalityTable, delaunay_optimality_2d, flip_edge, flippable_edges, random_flips
from .protection import ProtectionRecord, protection_sweep, protection_thickness_check, protection_trend
from .suite import CalibrationRecord, VerificationReport, calibrate_c_int, run_inequality_suite, run_verification

__all__ = [
    "CalibrationRecord",
    "ConvergenceRow",
    "ConvergenceTable",
    "ExperimentConfig",
    "MeshFamily",
    "OptimalityTable",
    "ProtectionRecord",
    "VerificationReport",
    "build_field",
    "calibrate_c_int",
    "convergence_study",
    "delaunay_optimality_2d",
    "derive_seed",
    "fit_order",
    "flip_edge",
    "flippable_edges",
    "list_families",
    "load_experiment",
    "make_family",
    "protection_sweep",
    "protection_thickness_check",
    "protection_trend",
    "random_flips",
    "register_family",
    "run_inequality_suite",
    "run_verification",
    "sliver_gadget",
    "structured_grid",
]
