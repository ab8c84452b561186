"""Lagrange bases on the unit reference simplex and affine element maps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Tuple

import numpy as np

from pdmesh.core.geometry import Simplex, is_degenerate
from pdmesh.errors import DegenerateSimplexError, DimensionMismatchError, InterpolationError
from pdmesh.utils.logging_utils import get_logger

__all__ = [
    "MAX_DEGREE",
    "ReferenceBasis",
    "AffineMap",
    "lattice_indices",
    "reference_nodes",
    "reference_basis",
]

_LOGGER = get_logger("Reference")

MAX_DEGREE = 6


@lru_cache(maxsize=None)
def lattice_indices(dim: int, degree: int) -> Tuple[Tuple[int, ...], ...]:
    """Multi-indices with total degree <= *degree*, vertices of the reference simplex first for degree 1."""

    indices = [alpha for alpha in product(range(degree + 1), repeat=dim) if sum(alpha) <= degree]
    return tuple(sorted(indices, key=lambda alpha: (sum(alpha), tuple(-a for a in alpha))))


def reference_nodes(dim: int, degree: int) -> np.ndarray:
    """Principal lattice nodes alpha/k of the unit simplex (degree 0 gives the vertices)."""

    if degree == 0:
        return np.vstack([np.zeros((1, dim)), np.eye(dim)])
    return np.asarray(lattice_indices(dim, degree), dtype=float) / degree


def _monomials(xi: np.ndarray, exponents: np.ndarray) -> np.ndarray:
    return np.prod(xi[:, None, :] ** exponents[None, :, :], axis=2)


@dataclass(frozen=True, eq=False)
class ReferenceBasis:
    """Nodal Lagrange basis of degree k; ``coefficients[:, j]`` expands L_j in monomials."""

    dim: int
    degree: int
    nodes: np.ndarray
    exponents: np.ndarray
    coefficients: np.ndarray
    condition: float = field(default=1.0)

    @property
    def size(self) -> int:
        return int(self.nodes.shape[0])

    def evaluate(self, xi: np.ndarray) -> np.ndarray:
        """Basis values at reference points, shape (n_points, N_p)."""

        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        if xi.shape[1] != self.dim:
            raise DimensionMismatchError(f"reference points have dimension {xi.shape[1]}, basis has {self.dim}")
        return _monomials(xi, self.exponents) @ self.coefficients

    def gradient(self, xi: np.ndarray) -> np.ndarray:
        """Reference gradients of the basis, shape (n_points, N_p, d)."""

        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        out = np.empty((xi.shape[0], self.size, self.dim))
        for axis in range(self.dim):
            lowered = self.exponents.copy()
            factor = lowered[:, axis].astype(float)
            lowered[:, axis] = np.maximum(lowered[:, axis] - 1, 0)
            out[:, :, axis] = (_monomials(xi, lowered) * factor[None, :]) @ self.coefficients
        return out


@lru_cache(maxsize=None)
def reference_basis(d: int, k: int) -> ReferenceBasis:
    """Equispaced Lagrange basis of degree *k* on the unit *d*-simplex (cached per (d, k))."""

    if d < 1:
        raise InterpolationError(f"dimension must be >= 1, got {d}")
    if not 1 <= k <= MAX_DEGREE:
        raise InterpolationError(f"unsupported interpolation degree {k} (1 <= k <= {MAX_DEGREE})")
    exponents = np.asarray(lattice_indices(d, k), dtype=np.int64)
    nodes = exponents.astype(float) / k
    vandermonde = _monomials(nodes, exponents)
    condition = float(np.linalg.cond(vandermonde))
    coefficients = np.linalg.solve(vandermonde, np.eye(len(nodes)))
    expected = math.comb(k + d, d)
    if len(nodes) != expected:
        raise InterpolationError(f"expected {expected} nodes, built {len(nodes)}")
    _LOGGER.debug("Reference basis d=%d k=%d: N_p=%d, Vandermonde condition %.3e", d, k, len(nodes), condition)
    for array in (nodes, exponents, coefficients):
        array.setflags(write=False)
    return ReferenceBasis(dim=d, degree=k, nodes=nodes, exponents=exponents, coefficients=coefficients, condition=condition)


@dataclass(frozen=True, eq=False)
class AffineMap:
    """x(ξ) = A ξ + b, sending reference vertex i to vertex i of the simplex."""

    matrix: np.ndarray
    offset: np.ndarray
    inverse_matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=float)
        offset = np.array(self.offset, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or offset.shape != (matrix.shape[0],):
            raise DimensionMismatchError("affine map needs a square matrix and a matching offset")
        try:
            inverse = np.linalg.inv(matrix)
        except np.linalg.LinAlgError as exc:
            raise DegenerateSimplexError("affine map is singular") from exc
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "inverse_matrix", inverse)

    @classmethod
    def from_simplex(cls, s: Simplex) -> "AffineMap":
        if is_degenerate(s):
            raise DegenerateSimplexError("no affine map onto a degenerate simplex")
        verts = s.vertices
        return cls(matrix=(verts[1:] - verts[0]).T, offset=verts[0])

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def __call__(self, xi: np.ndarray) -> np.ndarray:
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        return xi @ self.matrix.T + self.offset

    def inverse(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return (x - self.offset) @ self.inverse_matrix.T
