"""Exception hierarchy shared by every pdmesh module."""

from __future__ import annotations

from typing import Optional

__all__ = [
    "PdmeshError",
    "GeometryError",
    "DimensionMismatchError",
    "DegenerateSimplexError",
    "DegenerateFacetError",
    "MeshError",
    "MeshFormatError",
    "QualityError",
    "DelaunayError",
    "DeskScaleLimitError",
    "CoxeterError",
    "InterpolationError",
    "QuadratureError",
    "FieldError",
    "BoundError",
    "AssemblyError",
    "SolverError",
    "ExperimentError",
]


class PdmeshError(RuntimeError):
    """Root of all domain errors raised by the toolkit."""


class GeometryError(PdmeshError):
    """Raised when a single-simplex computation cannot be carried out."""


class DimensionMismatchError(GeometryError):
    """Raised when coordinates of different lengths are mixed."""


class DegenerateSimplexError(GeometryError):
    """Raised when a simplex is numerically void (zero volume or thickness)."""


class DegenerateFacetError(GeometryError):
    """Raised when a facet has zero (d-1)-volume so its altitude is undefined."""


class MeshError(PdmeshError):
    """Raised when a mesh is structurally invalid."""


class MeshFormatError(MeshError):
    """Raised when a mesh or point file cannot be parsed."""

    def __init__(self, message: str, *, line: Optional[int] = None, column: Optional[int] = None) -> None:
        location = ""
        if line is not None:
            location = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + location)
        self.line = line
        self.column = column


class QualityError(PdmeshError):
    """Raised when quality aggregates are requested on unusable input."""


class DelaunayError(PdmeshError):
    """Raised when a point set cannot be triangulated."""


class DeskScaleLimitError(DelaunayError):
    """Raised when an input exceeds the supported dimension or point count."""


class CoxeterError(PdmeshError):
    """Raised for invalid Coxeter lattice specifications."""


class InterpolationError(PdmeshError):
    """Raised for unsupported interpolation degrees or bad field values."""


class QuadratureError(PdmeshError):
    """Raised for unsupported quadrature requests."""


class FieldError(PdmeshError):
    """Raised when an analytic field cannot be built or evaluated."""


class BoundError(PdmeshError):
    """Raised when a bound is requested with invalid exponents or fields."""


class AssemblyError(PdmeshError):
    """Raised when a finite-element system cannot be assembled."""


class SolverError(PdmeshError):
    """Raised when the linear solver fails to converge."""


class ExperimentError(PdmeshError):
    """Raised when an experiment cannot be run as configured."""
