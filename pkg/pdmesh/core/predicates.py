"""Orientation and in-sphere predicates with an exact rational fallback.

Both predicates are evaluated first in floating point. When the determinant
is within the forward error bound of LU factorisation (see
:func:`_filter_bound`), the same determinant is rebuilt
from the exact binary values of the coordinates as :class:`fractions.Fraction`
entries and evaluated by exact elimination, so the returned sign is
always the sign of the exact determinant.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from typing import Callable, List, Sequence

import numpy as np

from pdmesh.errors import DegenerateSimplexError, DimensionMismatchError
from pdmesh.utils.logging_utils import get_logger

from .geometry import Simplex

__all__ = [
    "Location",
    "orientation",
    "in_sphere",
    "in_sphere_sign",
    "exact_determinant",
    "predicate_stats",
]

_LOGGER = get_logger("Predicates")

_UNIT_ROUNDOFF = float(np.finfo(float).eps) / 2.0

_STATS = {"float": 0, "exact": 0}


def _gamma(m: int) -> float:
    return m * _UNIT_ROUNDOFF / (1.0 - m * _UNIT_ROUNDOFF)


def _filter_bound(matrix: np.ndarray, det: float) -> float:
    """Worst-case |det_float - det_exact| for an n x n matrix factored by LU.

    LU with partial pivoting returns the exact determinant of A + E with
    |E| <= γ_{3n} |L||U| (Higham, Thm. 9.3); |L| <= 1 and pivot growth
    <= 2^(n-1) put every row of E below η·max_i ‖a_i‖. Rounding the entries
    themselves adds γ_{n+1} to η. Hadamard's inequality applied row by row
    then bounds the change of the determinant by ∏(‖a_i‖ + η·max‖a‖) - ∏‖a_i‖,
    and forming the product of the pivots adds γ_n·|det|.
    """

    n = matrix.shape[0]
    norms = np.linalg.norm(matrix, axis=1)
    eta = n * 2.0 ** (n - 1) * _gamma(3 * n) + _gamma(n + 1)
    slack = eta * float(norms.max(initial=0.0))
    spread = float(np.prod(norms + slack) - np.prod(norms))
    return spread + _gamma(n) * abs(det)


class Location(str, Enum):
    INSIDE = "inside"
    ON = "on"
    OUTSIDE = "outside"


def predicate_stats() -> dict:
    """Counts of float-decided versus exact-decided determinant signs."""

    return dict(_STATS)


def exact_determinant(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Determinant of a square matrix of Fractions by Gaussian elimination."""

    matrix: List[List[Fraction]] = [list(row) for row in rows]
    size = len(matrix)
    det = Fraction(1)
    for col in range(size):
        pivot = next((r for r in range(col, size) if matrix[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            matrix[col], matrix[pivot] = matrix[pivot], matrix[col]
            det = -det
        head = matrix[col][col]
        det *= head
        for r in range(col + 1, size):
            factor = matrix[r][col] / head
            if factor == 0:
                continue
            row, top = matrix[r], matrix[col]
            for c in range(col + 1, size):
                row[c] -= factor * top[c]
    return det


def _sign(value: float) -> int:
    return (value > 0) - (value < 0)


def _filtered_sign(matrix: np.ndarray, exact_rows: Callable[[], List[List[Fraction]]]) -> int:
    approx = float(np.linalg.det(matrix))
    bound = _filter_bound(matrix, approx)
    if abs(approx) > bound:
        _STATS["float"] += 1
        return _sign(approx)
    _STATS["exact"] += 1
    exact = exact_determinant(exact_rows())
    _LOGGER.debug("exact fallback: float det %.3e within bound %.3e, exact sign %d", approx, bound, _sign(exact))
    return _sign(exact)


def _as_points(points: Sequence[Sequence[float]] | np.ndarray) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] + 1:
        raise DimensionMismatchError("expected d+1 points in R^d")
    return arr


def orientation(points: Sequence[Sequence[float]] | np.ndarray) -> int:
    """Sign of det(p_1 - p_0, ..., p_d - p_0) for d+1 points in R^d."""

    arr = _as_points(points)
    matrix = arr[1:] - arr[0]

    def rows() -> List[List[Fraction]]:
        base = [Fraction(x) for x in arr[0]]
        return [[Fraction(x) - b for x, b in zip(point, base)] for point in arr[1:]]

    return _filtered_sign(matrix, rows)


def in_sphere_sign(points: Sequence[Sequence[float]] | np.ndarray, query: Sequence[float]) -> int:
    """+1 if *query* is strictly inside the circumsphere of *points*, 0 if on it, -1 if outside.

    With M the (d+1)x(d+1) matrix of rows (p_i - q, |p_i - q|^2), the query lies
    inside iff (-1)^d * orientation(points) * det(M) > 0.
    """

    arr = _as_points(points)
    q = np.asarray(query, dtype=float)
    if q.shape != (arr.shape[1],):
        raise DimensionMismatchError(f"query has dimension {q.size}, simplex lives in R^{arr.shape[1]}")
    orient = orientation(arr)
    if orient == 0:
        raise DegenerateSimplexError("in-sphere test on a degenerate simplex")

    shifted = arr - q
    lifted = np.column_stack([shifted, np.einsum("ij,ij->i", shifted, shifted)])

    def rows() -> List[List[Fraction]]:
        exact_q = [Fraction(x) for x in q]
        out = []
        for point in arr:
            diff = [Fraction(x) - y for x, y in zip(point, exact_q)]
            out.append(diff + [sum(value * value for value in diff)])
        return out

    lifted_sign = _filtered_sign(lifted, rows)
    parity = -1 if arr.shape[1] % 2 else 1
    return parity * orient * lifted_sign


def in_sphere(s: Simplex, q: Sequence[float]) -> Location:
    """Classify *q* against the circumsphere of *s*."""

    sign = in_sphere_sign(s.vertices, q)
    if sign > 0:
        return Location.INSIDE
    if sign < 0:
        return Location.OUTSIDE
    return Location.ON
