"""Unit tests for calibration and the verification report."""

from __future__ import annotations

import math
from typing import List

import pytest

from pdmesh.analysis.functionals import BoundCheckResult
from pdmesh.errors import ExperimentError
from pdmesh.verify.experiment import ExperimentConfig, derive_seed
from pdmesh.verify.suite import (
    CROSS_SEED_KEY,
    CalibrationRecord,
    Measurement,
    VerificationReport,
    _calibrate,
    _seed_constant,
    run_inequality_suite,
    run_verification,
    seed_stability,
)


def _measurements(values: List[float]) -> List[Measurement]:
    return [
        Measurement(index, BoundCheckResult("thm.interp_l2", lhs, 1.0, {"c_int": 1.0}), True)
        for index, lhs in enumerate(values)
    ]


def _tiny_config(**overrides: object) -> ExperimentConfig:
    values = dict(
        seed=3,
        dims=(2,),
        mesh_size=4,
        instances=2,
        fields=({"name": "random-polynomial", "params": {"degree": 3}},),
        rho=(2.0,),
        lam=(2.0,),
        degrees=(1,),
        fem_levels=(2, 4),
        coxeter_dims=(2,),
        optimality={"sets": 0, "points": 8, "alternatives": 0},
        convergence=False,
    )
    values.update(overrides)
    return ExperimentConfig(**values)


def test_calibration_on_synthetic_measurements() -> None:
    record = _calibrate(_measurements([0.5, 0.45, 0.4, 0.3]), ExperimentConfig())
    assert record.c_int_empirical == pytest.approx(0.5)
    assert record.heldout_empirical == pytest.approx(0.45)
    assert record.c_int_used == pytest.approx(1.0)
    assert record.heldout_pass_rate == 1.0
    assert record.calibration_size == 2 and record.heldout_size == 2
    assert record.per_check == {"thm.interp_l2": pytest.approx(0.5)}
    assert record.to_dict()["per_check"] == record.per_check
    assert record.passed


def test_fixed_constant_can_fail_the_held_out_split() -> None:
    record = _calibrate(_measurements([0.5, 0.45, 0.4, 0.3]), ExperimentConfig(c_int=0.1))
    assert record.source == "config"
    assert record.heldout_pass_rate == 0.0
    assert not record.passed


def test_calibration_needs_both_splits() -> None:
    with pytest.raises(ExperimentError, match="empty split"):
        _calibrate(_measurements([0.5]), ExperimentConfig())
    with pytest.raises(ExperimentError, match="reproduced"):
        _calibrate(_measurements([0.0, 0.0]), ExperimentConfig())


def test_uncalibratable_measurements_are_skipped() -> None:
    measurements = _measurements([0.5, 0.45]) + [
        Measurement(2, BoundCheckResult("thm.interp_l2", 5.0, 1.0, {"c_int": 1.0}), False)
    ]
    assert _calibrate(measurements, ExperimentConfig()).c_int_empirical == pytest.approx(0.5)


def test_stability_ratio() -> None:
    record = CalibrationRecord(0.2, 2.0, 0.4, 1.0, 0.5, 10, 10)
    assert record.stability_ratio == pytest.approx(2.5)
    assert not record.stable
    assert not record.passed
    zero = CalibrationRecord(0.0, 2.0, 0.0, 1.0, 0.5, 10, 10)
    assert math.isinf(zero.stability_ratio)


def test_cross_seed_spread_above_limit_fails() -> None:
    record = CalibrationRecord(0.2, 2.0, 0.4, 1.0, 0.25, 10, 10, seed_empirical=0.2, cross_seed=5, cross_seed_empirical=0.5)
    assert record.stable
    assert record.seed_stability_ratio == pytest.approx(2.5)
    assert not record.seed_stable
    assert not record.passed
    assert record.to_dict()["seed_stable"] is False
    report = VerificationReport(
        config=ExperimentConfig(),
        checks=(),
        calibration=record,
        protection=(),
        trend=(),
        trend_monotone=True,
        convergence=None,
        optimality=None,
    )
    assert not report.passed


def test_cross_seed_spread_within_limit_passes() -> None:
    record = CalibrationRecord(0.2, 2.0, 0.4, 1.0, 0.25, 10, 10, seed_empirical=0.3, cross_seed=5, cross_seed_empirical=0.2)
    assert record.seed_stability_ratio == pytest.approx(1.5)
    assert record.seed_stable and record.passed
    unmeasured = CalibrationRecord(0.2, 2.0, 0.4, 1.0, 0.25, 10, 10)
    assert unmeasured.seed_stability_ratio is None
    assert unmeasured.seed_stable


def _result(lhs: float) -> BoundCheckResult:
    return BoundCheckResult("thm.interp_l2", lhs, 1.0, {"c_int": 1.0})


def test_seed_constant_uses_planar_linear_calibration_split() -> None:
    measurements = [
        Measurement(0, _result(0.3), True, 2, 1),
        Measurement(1, _result(0.9), True, 2, 1),
        Measurement(2, _result(0.8), True, 3, 1),
        Measurement(4, _result(0.7), True, 2, 2),
        Measurement(6, _result(0.6), False, 2, 1),
        Measurement(8, _result(0.4), True),
    ]
    assert _seed_constant(measurements) == pytest.approx(0.3)
    assert _seed_constant(measurements[2:]) is None


def test_seed_stability_skips_sweeps_without_planar_linear_instances() -> None:
    constant, cross_seed, cross_constant = seed_stability(_tiny_config(degrees=(2,)))
    assert constant is None and cross_constant is None
    assert cross_seed == derive_seed(3, CROSS_SEED_KEY)


@pytest.mark.slow
def test_seed_stability_calibrates_a_disjoint_seed() -> None:
    config = _tiny_config(instances=4)
    constant, cross_seed, cross_constant = seed_stability(config)
    assert cross_seed != config.seed
    assert constant is not None and constant > 0.0
    assert cross_constant is not None and cross_constant > 0.0
    assert seed_stability(config) == (constant, cross_seed, cross_constant)


def test_empty_field_list_gives_empty_suite() -> None:
    assert run_inequality_suite(_tiny_config(fields=())) == []


@pytest.mark.slow
def test_tiny_verification_run() -> None:
    report = run_verification(_tiny_config())
    payload = report.to_dict()
    names = {check.name for check in report.checks}
    assert {"lemma1.lower", "lemma1.upper", "lemma2", "fem.cea", "fem.energy_minimum"} <= names
    assert payload["summary"]["checks"] == len(report.checks)
    assert payload["calibration"]["calibration_size"] > 0
    assert payload["calibration"]["cross_seed"] == derive_seed(3, CROSS_SEED_KEY)
    assert payload["calibration"]["cross_seed_empirical"] is not None
    assert payload["protection"]["monotone"] is True
    assert payload["optimality"] is None
    assert len(payload["checksum"]) == 64
    assert run_verification(_tiny_config()).to_dict()["checksum"] == payload["checksum"]
    assert any(row["section"] == "protection" for row in report.csv_rows())
