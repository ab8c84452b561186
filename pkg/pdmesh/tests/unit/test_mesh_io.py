"""Unit tests for the mesh and points file formats."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from pdmesh.core.mesh import SimplicialMesh
from pdmesh.core.mesh_io import load_mesh, load_points, read_mesh, save_mesh, save_points, write_mesh
from pdmesh.errors import MeshError, MeshFormatError


def test_text_mesh_with_comments() -> None:
    text = "# unit triangle\n2 3 1\n0 0\n\n1 0\n0 1\n0 1 2\n"
    mesh = load_mesh(text)
    assert mesh.dim == 2
    assert mesh.n_cells == 1
    assert mesh.coords[1].tolist() == [1.0, 0.0]


def test_written_text_mesh_reads_back_bit_identical(tmp_path: Path) -> None:
    coords = np.array([[0.1, 1.0 / 3.0], [2.0 / 7.0, 0.0], [0.0, 1e-17 + 0.5]])
    mesh = SimplicialMesh(coords, [[0, 1, 2]])
    target = write_mesh(mesh, tmp_path / "tri.mesh")
    again = read_mesh(target)
    assert again == mesh
    assert b"\r" not in target.read_bytes()


def test_json_format_is_detected_by_suffix(tmp_path: Path, square_mesh: SimplicialMesh) -> None:
    target = write_mesh(square_mesh, tmp_path / "square.json")
    assert target.read_text(encoding="utf-8").startswith('{"cells"')
    assert read_mesh(target) == square_mesh


def test_save_mesh_is_canonical(square_mesh: SimplicialMesh) -> None:
    assert save_mesh(load_mesh(save_mesh(square_mesh))) == save_mesh(square_mesh)


def test_header_mismatch_reports_line() -> None:
    with pytest.raises(MeshFormatError, match="line 3"):
        load_mesh("2 3 1\n0 0\n1 0 7\n0 1\n0 1 2\n")


def test_truncated_file() -> None:
    with pytest.raises(MeshFormatError, match="expected 1 cells"):
        load_mesh("2 3 1\n0 0\n1 0\n0 1\n")


def test_trailing_content_is_rejected() -> None:
    with pytest.raises(MeshFormatError, match="trailing"):
        load_mesh("2 3 1\n0 0\n1 0\n0 1\n0 1 2\n0 1 2\n")


def test_duplicate_points_are_rejected() -> None:
    with pytest.raises(MeshError, match="duplicate"):
        load_mesh("2 3 1\n0 0\n0 0\n0 1\n0 1 2\n")


def test_out_of_range_cell_index() -> None:
    with pytest.raises(MeshError):
        load_mesh("2 3 1\n0 0\n1 0\n0 1\n0 1 5\n")


def test_malformed_json() -> None:
    with pytest.raises(MeshFormatError, match="malformed JSON"):
        load_mesh('{"dim": 2, "points": [', format="json")


def test_points_round_trip() -> None:
    points = load_points("3 2\n0 0 0\n0.25 0.5 1e-3\n")
    assert points.dim == 3
    assert load_points(save_points(points)).coords.tolist() == points.coords.tolist()


def test_unknown_format() -> None:
    with pytest.raises(ValueError):
        load_mesh("2 0 0\n", format="vtk")
