"""Unit tests for order fits and refinement studies."""

from __future__ import annotations

import math

import pytest

from pdmesh.errors import ExperimentError
from pdmesh.interp.fields import make_field
from pdmesh.verify.convergence import (
    ConvergenceRow,
    ConvergenceTable,
    convergence_study,
    expected_order,
    fem_errors,
    fit_order,
    interpolation_errors,
    mesh_size,
)
from pdmesh.verify.experiment import ExperimentConfig
from pdmesh.verify.families import structured_grid


def test_fit_order_recovers_the_exponent() -> None:
    h = [0.4, 0.2, 0.1, 0.05]
    slope, r2 = fit_order(h, [3.0 * x**2 for x in h])
    assert slope == pytest.approx(2.0)
    assert r2 == pytest.approx(1.0)


def test_fit_order_needs_three_levels() -> None:
    with pytest.raises(ExperimentError):
        fit_order([0.5, 0.25], [1.0, 0.5])


def test_mesh_size_of_kuhn_grid() -> None:
    assert mesh_size(structured_grid(2, 4)) == pytest.approx(math.sqrt(2.0) / 4.0)
    assert mesh_size(structured_grid(3, 2)) == pytest.approx(math.sqrt(3.0) / 2.0)


def test_gradient_interpolation_order_follows_degree() -> None:
    row = interpolation_errors(make_field("trig-product", 2), 2, 1, [4, 8, 16])
    assert not row.exact
    assert 1.9 <= row.slope <= 2.1
    assert row.passed
    assert row.errors[0] > row.errors[-1]


def test_quadratic_gradient_interpolation_is_third_order() -> None:
    row = interpolation_errors(make_field("trig-product", 2), 2, 2, [4, 8, 16])
    assert not row.exact
    assert row.slope >= 2.9
    assert row.passed


def test_reproduced_gradient_is_exact() -> None:
    row = interpolation_errors(make_field("quadratic", 2), 2, 1, [2, 4, 8])
    assert row.exact
    assert math.isnan(row.slope)
    assert row.passed


def test_fem_gradient_error_is_first_order() -> None:
    row = fem_errors("sine-product", 2, [4, 8, 16])
    assert row.quantity == "fem_gradient_l2"
    assert 0.9 <= row.slope <= 1.1
    assert row.passed


def _synthetic_row(quantity: str, k: int, slope: float) -> ConvergenceRow:
    return ConvergenceRow(quantity, "synthetic", 2, k, (4, 8, 16), (0.35, 0.18, 0.09), (1.0, 0.5, 0.25), slope, 1.0, False)


def test_interpolation_row_below_degree_order_fails() -> None:
    assert not _synthetic_row("interp_gradient_l2", 2, 1.2).passed
    assert not _synthetic_row("interp_gradient_l2", 1, 1.5).passed
    assert _synthetic_row("interp_gradient_l2", 2, 2.95).passed
    assert _synthetic_row("interp_gradient_l2", 1, 3.4).passed


def test_fem_row_outside_first_order_fails() -> None:
    assert not _synthetic_row("fem_gradient_l2", 1, 1.6).passed
    assert not _synthetic_row("fem_gradient_l2", 1, 0.7).passed
    assert _synthetic_row("fem_gradient_l2", 1, 1.02).passed
    assert ConvergenceTable(rows=(_synthetic_row("fem_gradient_l2", 1, 1.0), _synthetic_row("fem_gradient_l2", 1, 1.6))).passed is False


def test_expected_order_intervals() -> None:
    assert expected_order("fem_gradient_l2", 1) == pytest.approx((0.9, 1.1))
    low, high = expected_order("interp_gradient_l2", 3)
    assert low == pytest.approx(3.9)
    assert math.isinf(high)


def test_study_needs_three_levels() -> None:
    with pytest.raises(ExperimentError):
        convergence_study(ExperimentConfig(levels=(4, 8)))


def test_small_study() -> None:
    config = ExperimentConfig(
        dims=(2,),
        levels=(2, 4, 8),
        fem_levels=(4, 8, 16),
        fields=({"name": "trig-product", "params": {}},),
        degrees=(1,),
    )
    table = convergence_study(config)
    assert [row.quantity for row in table.rows] == ["interp_gradient_l2", "fem_gradient_l2"]
    assert table.to_dict()["passed"] == table.passed
