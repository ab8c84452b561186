"""Quadrature rules on the unit reference simplex {ξ_i >= 0, Σ ξ_i <= 1}.

Two families are available:

``grundmann-moller``
    The classical invariant rules with rational barycentric nodes. Exact for
    odd degrees 2s+1; even requests round up. Some weights are negative.
``conical``
    A collapsed-coordinate product of Gauss-Jacobi rules. All weights are
    positive and every node lies strictly inside the simplex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Dict, Iterator, Tuple

import numpy as np
from scipy.special import roots_jacobi

from pdmesh.errors import QuadratureError
from pdmesh.utils.logging_utils import get_logger

__all__ = [
    "FAMILIES",
    "MAX_QUADRATURE_DIM",
    "MAX_EXACTNESS",
    "QuadratureRule",
    "quadrature_rule",
    "monomial_integral",
]

_LOGGER = get_logger("Quadrature")

FAMILIES = ("grundmann-moller", "conical")
MAX_QUADRATURE_DIM = 5
MAX_EXACTNESS = {"grundmann-moller": 10, "conical": 30}


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    dim: int
    exactness: int
    nodes: np.ndarray
    weights: np.ndarray
    family: str = "grundmann-moller"

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])

    def integrate_reference(self, values: np.ndarray) -> float:
        """Σ_q w_q f(ξ_q) for values sampled at the rule nodes."""

        return float(np.asarray(values, dtype=float) @ self.weights)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "exactness": self.exactness,
            "family": self.family,
            "nodes": self.nodes.tolist(),
            "weights": self.weights.tolist(),
        }


def monomial_integral(exponents: Tuple[int, ...]) -> float:
    """∫ ξ^α over the unit simplex: α_1! ... α_d! / (|α| + d)!."""

    numerator = math.prod(math.factorial(a) for a in exponents)
    return numerator / math.factorial(sum(exponents) + len(exponents))


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def _grundmann_moller(dim: int, exactness: int) -> Tuple[np.ndarray, np.ndarray, int]:
    s = exactness // 2
    degree = 2 * s + 1
    weights: Dict[Tuple[Fraction, ...], float] = {}
    for i in range(s + 1):
        denominator = degree + dim - 2 * i
        weight = (-1) ** i * 2.0 ** (-2 * s) * denominator**degree / (math.factorial(i) * math.factorial(degree + dim - i))
        for beta in _compositions(s - i, dim + 1):
            # first barycentric coordinate belongs to the origin vertex
            point = tuple(Fraction(2 * b + 1, denominator) for b in beta[1:])
            weights[point] = weights.get(point, 0.0) + weight
    keys = sorted(weights)
    nodes = np.array([[float(c) for c in key] for key in keys])
    return nodes, np.array([weights[key] for key in keys]), degree


def _conical(dim: int, exactness: int) -> Tuple[np.ndarray, np.ndarray, int]:
    count = max(1, math.ceil((exactness + 1) / 2))
    axes = []
    for axis in range(dim):
        alpha = dim - axis - 1
        t, w = roots_jacobi(count, alpha, 0.0)
        axes.append(((t + 1.0) / 2.0, w / 2.0 ** (alpha + 1)))
    nodes, weights = [], []
    for combo in product(range(count), repeat=dim):
        u = [axes[axis][0][j] for axis, j in enumerate(combo)]
        weight = math.prod(axes[axis][1][j] for axis, j in enumerate(combo))
        point, remaining = [], 1.0
        for value in u:
            point.append(remaining * value)
            remaining *= 1.0 - value
        nodes.append(point)
        weights.append(weight)
    return np.array(nodes), np.array(weights), 2 * count - 1


@lru_cache(maxsize=None)
def quadrature_rule(d: int, exactness: int, family: str = "grundmann-moller") -> QuadratureRule:
    """Rule on the unit *d*-simplex integrating every polynomial of degree <= *exactness* exactly."""

    if family not in FAMILIES:
        raise QuadratureError(f"unknown quadrature family '{family}' (expected one of {FAMILIES})")
    if not 1 <= d <= MAX_QUADRATURE_DIM:
        raise QuadratureError(f"quadrature is available for 1 <= d <= {MAX_QUADRATURE_DIM}, got {d}")
    limit = MAX_EXACTNESS[family]
    if not 0 <= exactness <= limit:
        raise QuadratureError(f"unsupported exactness {exactness} for {family} (0..{limit})")
    builder = _grundmann_moller if family == "grundmann-moller" else _conical
    nodes, weights, achieved = builder(d, exactness)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    _LOGGER.debug("Quadrature %s d=%d exactness=%d: %d nodes", family, d, achieved, len(weights))
    return QuadratureRule(dim=d, exactness=achieved, nodes=nodes, weights=weights, family=family)
