"""Unit tests for simplex quadrature rules."""

from __future__ import annotations

import math
from itertools import product

import numpy as np
import pytest

from pdmesh.errors import QuadratureError
from pdmesh.interp.quadrature import FAMILIES, monomial_integral, quadrature_rule


def _monomials(dim: int, degree: int):
    return [alpha for alpha in product(range(degree + 1), repeat=dim) if sum(alpha) <= degree]


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("dim,exactness", [(1, 5), (2, 3), (2, 6), (3, 4), (4, 3), (5, 2)])
def test_rules_integrate_monomials_exactly(family: str, dim: int, exactness: int) -> None:
    rule = quadrature_rule(dim, exactness, family)
    assert rule.exactness >= exactness
    for alpha in _monomials(dim, exactness):
        values = np.prod(rule.nodes ** np.asarray(alpha), axis=1)
        assert rule.integrate_reference(values) == pytest.approx(monomial_integral(alpha), rel=1e-11, abs=1e-14)


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_weights_sum_to_reference_volume(dim: int) -> None:
    for family in FAMILIES:
        assert quadrature_rule(dim, 4, family).weights.sum() == pytest.approx(1.0 / math.factorial(dim))


def test_conical_weights_are_positive_and_nodes_interior() -> None:
    rule = quadrature_rule(3, 9, "conical")
    assert np.all(rule.weights > 0.0)
    assert np.all(rule.nodes > 0.0)
    assert np.all(rule.nodes.sum(axis=1) < 1.0)


def test_monomial_integral() -> None:
    assert monomial_integral((1, 1)) == pytest.approx(1.0 / 24.0)
    assert monomial_integral((0, 0, 0)) == pytest.approx(1.0 / 6.0)


def test_rule_errors() -> None:
    with pytest.raises(QuadratureError):
        quadrature_rule(2, 4, "gauss-legendre")
    with pytest.raises(QuadratureError):
        quadrature_rule(6, 2)
    with pytest.raises(QuadratureError):
        quadrature_rule(2, 11)
