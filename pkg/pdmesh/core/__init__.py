"""Geometry, meshes, quality metrics and mesh generators."""

from .coxeter import CoxeterSpec, coxeter_protection_trend, generate_coxeter, lattice_map
from .delaunay import ProtectionReport, delaunay_triangulate, empty_sphere_violations, is_protected, protection_report
from .geometry import (
    Ball,
    Simplex,
    altitudes,
    circumsphere,
    diameter,
    enclosing_ball_brute_force,
    facet_volumes,
    insphere_diameter,
    min_containment_ball,
    simplex_volume,
    smallest_enclosing_ball,
    thickness,
)
from .mesh import NetParameters, PointSet, SimplicialMesh, net_parameters, validate_manifold
from .mesh_io import load_mesh, load_points, read_mesh, read_points, save_mesh, save_points, write_mesh
from .predicates import Location, in_sphere, orientation
from .quality import ElementMetrics, QualityReport, element_metrics, quality_report, theta_upper_bound

__all__ = [
    "Ball",
    "CoxeterSpec",
    "ElementMetrics",
    "Location",
    "NetParameters",
    "PointSet",
    "ProtectionReport",
    "QualityReport",
    "Simplex",
    "SimplicialMesh",
    "altitudes",
    "circumsphere",
    "coxeter_protection_trend",
    "delaunay_triangulate",
    "diameter",
    "element_metrics",
    "empty_sphere_violations",
    "enclosing_ball_brute_force",
    "facet_volumes",
    "generate_coxeter",
    "in_sphere",
    "insphere_diameter",
    "is_protected",
    "lattice_map",
    "load_mesh",
    "load_points",
    "min_containment_ball",
    "net_parameters",
    "orientation",
    "protection_report",
    "quality_report",
    "read_mesh",
    "read_points",
    "save_mesh",
    "save_points",
    "simplex_volume",
    "smallest_enclosing_ball",
    "thickness",
    "theta_upper_bound",
    "validate_manifold",
    "write_mesh",
]
