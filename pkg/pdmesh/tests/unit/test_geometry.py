"""Unit tests for single-simplex geometry."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdmesh.core.geometry import (
    Simplex,
    altitudes,
    circumsphere,
    diameter,
    enclosing_ball_brute_force,
    facet_volumes,
    insphere_diameter,
    is_degenerate,
    min_containment_ball,
    simplex_volume,
    smallest_enclosing_ball,
    thickness,
)
from pdmesh.errors import DegenerateSimplexError, GeometryError


def test_right_triangle_closed_forms(right_triangle: Simplex) -> None:
    assert simplex_volume(right_triangle) == pytest.approx(0.5)
    assert diameter(right_triangle) == pytest.approx(math.sqrt(2.0))
    assert sorted(altitudes(right_triangle)) == pytest.approx([math.sqrt(2.0) / 2.0, 1.0, 1.0])
    assert thickness(right_triangle) == pytest.approx(0.25)
    assert insphere_diameter(right_triangle) == pytest.approx(2.0 - math.sqrt(2.0))


def test_circumsphere_of_right_triangle_is_hypotenuse_midpoint(right_triangle: Simplex) -> None:
    ball = circumsphere(right_triangle)
    assert ball.center == pytest.approx([0.5, 0.5])
    assert ball.radius == pytest.approx(math.sqrt(2.0) / 2.0)


def test_equilateral_thickness(equilateral: Simplex) -> None:
    assert thickness(equilateral) == pytest.approx(math.sqrt(3.0) / 4.0)
    assert diameter(equilateral) / insphere_diameter(equilateral) == pytest.approx(math.sqrt(3.0))


def test_unit_tetrahedron(unit_tetrahedron: Simplex) -> None:
    assert simplex_volume(unit_tetrahedron) == pytest.approx(1.0 / 6.0)
    assert facet_volumes(unit_tetrahedron)[0] == pytest.approx(math.sqrt(3.0) / 2.0)
    assert thickness(unit_tetrahedron) == pytest.approx(1.0 / (3.0 * math.sqrt(6.0)))
    assert min_containment_ball(unit_tetrahedron).radius == pytest.approx(math.sqrt(6.0) / 3.0)


def test_min_containment_ball_of_obtuse_triangle_is_longest_edge_ball() -> None:
    s = Simplex(np.array([[0.0, 0.0], [4.0, 0.0], [2.0, 0.5]]))
    ball = min_containment_ball(s)
    assert ball.center == pytest.approx([2.0, 0.0])
    assert ball.radius == pytest.approx(2.0)
    assert ball.radius < circumsphere(s).radius


def test_flat_simplex_is_degenerate() -> None:
    flat = Simplex(np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]))
    assert is_degenerate(flat)
    assert thickness(flat) == 0.0
    assert insphere_diameter(flat) == 0.0
    with pytest.raises(DegenerateSimplexError):
        circumsphere(flat)


def test_wrong_vertex_count_is_rejected() -> None:
    with pytest.raises(GeometryError):
        Simplex(np.zeros((2, 2)))


def test_volume_is_invariant_under_rigid_motion(unit_tetrahedron: Simplex) -> None:
    angle = 0.3
    rotation = np.array([[math.cos(angle), -math.sin(angle), 0.0], [math.sin(angle), math.cos(angle), 0.0], [0.0, 0.0, 1.0]])
    moved = unit_tetrahedron.transformed(rotation, [1.0, -2.0, 0.5])
    assert simplex_volume(moved) == pytest.approx(simplex_volume(unit_tetrahedron))
    assert thickness(moved) == pytest.approx(thickness(unit_tetrahedron))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
def test_welzl_matches_brute_force(seed: int, dim: int) -> None:
    points = np.random.default_rng(seed).normal(size=(7, dim))
    fast = smallest_enclosing_ball(points)
    reference = enclosing_ball_brute_force(points)
    assert fast.radius == pytest.approx(reference.radius, rel=1e-6, abs=1e-9)
    assert all(fast.contains(p, slack=1e-6) for p in points)
