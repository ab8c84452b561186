"""Unit tests for element metrics and mesh-wide quality aggregates."""

from __future__ import annotations

import math

import numpy as np
import pytest

from pdmesh.core.geometry import Simplex
from pdmesh.core.mesh import SimplicialMesh
from pdmesh.core.quality import element_metrics, quality_report, theta_upper_bound
from pdmesh.errors import DegenerateSimplexError, QualityError


def test_right_triangle_metrics(right_triangle: Simplex) -> None:
    metrics = element_metrics(right_triangle)
    assert metrics.xi == pytest.approx(0.25)
    assert metrics.sigma == pytest.approx(1.0 + math.sqrt(2.0))
    assert metrics.theta_local == pytest.approx(2.0)
    assert metrics.upsilon == pytest.approx(math.sqrt(2.0))
    assert metrics.r_min == pytest.approx(math.sqrt(2.0) / 2.0)


def test_equilateral_metrics(equilateral: Simplex) -> None:
    metrics = element_metrics(equilateral)
    assert metrics.xi == pytest.approx(math.sqrt(3.0) / 4.0)
    assert metrics.sigma == pytest.approx(math.sqrt(3.0))
    assert metrics.upsilon == pytest.approx(math.sqrt(3.0))


def test_unit_tetrahedron_metrics(unit_tetrahedron: Simplex) -> None:
    metrics = element_metrics(unit_tetrahedron)
    assert metrics.xi == pytest.approx(1.0 / (3.0 * math.sqrt(6.0)))
    assert metrics.r_min == pytest.approx(math.sqrt(6.0) / 3.0)
    assert metrics.theta_local == pytest.approx(1.5)


def test_degenerate_element_is_rejected() -> None:
    with pytest.raises(DegenerateSimplexError):
        element_metrics(Simplex(np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])))


def test_single_cell_report(triangle_mesh: SimplicialMesh) -> None:
    report = quality_report(triangle_mesh)
    assert report.card == 1
    assert report.c_xi == pytest.approx(0.25)
    assert report.c_delta == pytest.approx(1.0)
    assert report.theta == pytest.approx(2.0)
    assert report.theta_rescaled == pytest.approx(2.0 / 12.0)
    assert report.summary()["note"].startswith("Theta is unscaled")


def test_square_report(square_mesh: SimplicialMesh) -> None:
    report = quality_report(square_mesh)
    assert report.h == pytest.approx(1.0)
    assert report.r_max == pytest.approx(0.5)
    assert report.theta == pytest.approx(4 * 2.0 * 0.25)
    rows = report.csv_rows()
    assert [row["row"] for row in rows] == ["element"] * 4 + ["summary"]


def test_report_is_independent_of_worker_count(random_mesh: SimplicialMesh) -> None:
    serial = quality_report(random_mesh, workers=1)
    threaded = quality_report(random_mesh, workers=4)
    assert serial.to_dict() == threaded.to_dict()


def test_scaling_keeps_shape_measures(random_mesh: SimplicialMesh) -> None:
    base = quality_report(random_mesh)
    scaled = quality_report(random_mesh.scaled(3.0))
    assert scaled.c_xi == pytest.approx(base.c_xi)
    assert scaled.c_sigma == pytest.approx(base.c_sigma)
    assert scaled.h == pytest.approx(3.0 * base.h)
    assert scaled.theta == pytest.approx(base.theta * 3.0 ** (random_mesh.dim + 2))


def test_theta_upper_bound_holds(random_mesh: SimplicialMesh) -> None:
    report = quality_report(random_mesh)
    assert report.theta <= theta_upper_bound(report)


def test_empty_mesh_has_no_report() -> None:
    with pytest.raises(QualityError):
        quality_report(SimplicialMesh([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], []))
