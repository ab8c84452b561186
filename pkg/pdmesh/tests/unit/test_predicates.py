"""Unit tests for the filtered exact predicates."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from pdmesh.core.geometry import Simplex
from pdmesh.core.predicates import (
    Location,
    _filter_bound,
    exact_determinant,
    in_sphere,
    in_sphere_sign,
    orientation,
    predicate_stats,
)
from pdmesh.errors import DegenerateSimplexError


def test_orientation_sign_follows_vertex_order() -> None:
    assert orientation([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]) == 1
    assert orientation([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]) == -1
    assert orientation([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]) == 0


def test_orientation_is_exact_for_nearly_collinear_points() -> None:
    # the third point is off the line by one ulp-scale step in y
    points = [[0.5, 0.5], [12.0, 12.0], [24.0, 24.0 + 2.0**-48]]
    assert orientation(points) == 1
    assert orientation([[0.5, 0.5], [12.0, 12.0], [24.0, 24.0]]) == 0


def test_exact_determinant() -> None:
    rows = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)]]
    assert exact_determinant(rows) == 5


def test_in_sphere_classification(right_triangle: Simplex) -> None:
    assert in_sphere(right_triangle, [0.4, 0.4]) is Location.INSIDE
    assert in_sphere(right_triangle, [1.0, 1.0]) is Location.ON
    assert in_sphere(right_triangle, [2.0, 2.0]) is Location.OUTSIDE


def test_in_sphere_does_not_depend_on_orientation() -> None:
    ccw = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
    cw = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]
    assert in_sphere_sign(ccw, [0.5, 0.5]) == in_sphere_sign(cw, [0.5, 0.5]) == 1


def test_in_sphere_three_dimensions(unit_tetrahedron: Simplex) -> None:
    assert in_sphere(unit_tetrahedron, [1.0, 1.0, 1.0]) is Location.ON
    assert in_sphere(unit_tetrahedron, [0.25, 0.25, 0.25]) is Location.INSIDE
    assert in_sphere(unit_tetrahedron, np.array([2.0, 2.0, 2.0])) is Location.OUTSIDE


def test_in_sphere_rejects_degenerate_simplex() -> None:
    with pytest.raises(DegenerateSimplexError):
        in_sphere_sign([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], [0.0, 1.0])


def test_filter_bound_scales_with_row_norms() -> None:
    identity = np.eye(3)
    bound = _filter_bound(identity, 1.0)
    assert 0.0 < bound < 1e-12
    assert _filter_bound(1e3 * identity, 1e9) == pytest.approx(1e9 * bound, rel=0.05)
    assert _filter_bound(np.zeros((3, 3)), 0.0) == 0.0


def test_near_cocircular_query_takes_the_exact_path() -> None:
    triangle = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
    before = predicate_stats()["exact"]
    assert in_sphere_sign(triangle, [1.0, 1.0 + 2.0**-52]) == -1
    assert in_sphere_sign(triangle, [1.0, 1.0 - 2.0**-53]) == 1
    assert predicate_stats()["exact"] >= before + 2


def test_well_separated_query_is_decided_in_floating_point() -> None:
    before = predicate_stats()["exact"]
    assert in_sphere_sign([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [0.1, 0.1]) == 1
    assert predicate_stats()["exact"] == before
