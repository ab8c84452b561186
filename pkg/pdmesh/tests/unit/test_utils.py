"""Unit tests for the serialization, report, config and worker helpers."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from pdmesh.utils.config_loader import ConfigError, load_config, validate_config
from pdmesh.utils.parallel import parallel_map, worker_count
from pdmesh.utils.reports import load_json_report, rows_to_csv, with_checksum, write_csv, write_json_report
from pdmesh.utils.serialization import SerializationError, format_real, from_json, generate_checksum, to_json


def test_format_real() -> None:
    assert format_real(0.25) == "2.5000000000000000e-01"
    assert float(format_real(math.pi)) == math.pi
    assert format_real(math.inf) == "inf"
    assert format_real(-math.inf) == "-inf"
    assert format_real(math.nan) == "nan"


def test_json_is_canonical_and_keeps_infinities() -> None:
    text = to_json({"b": np.float64(math.inf), "a": np.arange(2)})
    assert text == '{"a":[0,1],"b":"inf"}'
    assert from_json(text) == {"a": [0, 1], "b": math.inf}
    with pytest.raises(SerializationError):
        from_json("{")


def test_checksum_ignores_key_order() -> None:
    assert generate_checksum({"x": 1, "y": 2}) == generate_checksum({"y": 2, "x": 1})
    assert generate_checksum({"x": 1}) != generate_checksum({"x": 2})
    with pytest.raises(SerializationError):
        generate_checksum({}, algorithm="not-a-hash")


def test_with_checksum_is_stable() -> None:
    first = with_checksum({"value": 1.5})
    assert with_checksum(first) == first


def test_reports_round_trip(tmp_path: Path) -> None:
    path = write_json_report({"r": math.inf, "n": 3}, tmp_path / "out" / "report.json")
    assert path.read_text(encoding="utf-8").endswith("\n")
    assert load_json_report(path) == {"r": math.inf, "n": 3}
    with pytest.raises(FileNotFoundError):
        load_json_report(tmp_path / "missing.json")


def test_csv_rows(tmp_path: Path) -> None:
    text = rows_to_csv([{"name": "a", "value": 0.5, "pass": True}, {"name": "b", "extra": None}])
    lines = text.splitlines()
    assert lines[0] == "name,value,pass,extra"
    assert lines[1] == "a,5.0000000000000000e-01,true,"
    assert lines[2] == "b,,,"
    target = write_csv([{"x": 1}], tmp_path / "table.csv")
    assert target.read_text(encoding="utf-8") == "x\n1\n"


def test_worker_count(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("THREADS", raising=False)
    assert worker_count() == 1
    monkeypatch.setenv("THREADS", "4")
    assert worker_count() == 4
    monkeypatch.setenv("THREADS", "0")
    assert worker_count() == 1
    monkeypatch.setenv("THREADS", "many")
    assert worker_count(default=2) == 2


def test_parallel_map_keeps_order() -> None:
    assert parallel_map(lambda x: x * x, range(10), workers=4) == [x * x for x in range(10)]


def test_config_loader(tmp_path: Path) -> None:
    good = tmp_path / "good.yaml"
    good.write_text("seed: 1\n", encoding="utf-8")
    assert load_config(good) == {"seed": 1}
    broken = tmp_path / "broken.yaml"
    broken.write_text("seed: [1\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(broken)
    with pytest.raises(FileNotFoundError):
        load_config(tmp_path / "missing.yaml")


def test_validate_config_reports_location() -> None:
    with pytest.raises(ConfigError, match="dims"):
        validate_config({"dims": ["two"]}, "experiment_config_schema")
    with pytest.raises(FileNotFoundError):
        validate_config({}, "no_such_schema")
