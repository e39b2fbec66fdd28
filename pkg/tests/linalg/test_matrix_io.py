"""Tests for linalg.matrix_io."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from linalg.matrix_io import load_matrix, save_matrix
from utils import ShapeMismatchError, ValidationError


@pytest.fixture
def matrix() -> np.ndarray:
    return np.array([[0.1, 1.0 / 3.0], [-2.5, 1e-17], [4.0, 0.2]])


@pytest.mark.parametrize("suffix", [".csv", ".json"])
def test_save_then_load_is_exact(tmp_path: Path, matrix: np.ndarray, suffix: str) -> None:
    path = save_matrix(matrix, tmp_path / f"A{suffix}")
    np.testing.assert_array_equal(load_matrix(path), matrix)


def test_csv_layout(tmp_path: Path) -> None:
    path = save_matrix([[1.0, 2.0], [3.0, 4.5]], tmp_path / "A.csv")
    assert path.read_bytes() == b"2,2\n1.0,2.0\n3.0,4.5\n"


def test_json_layout(tmp_path: Path) -> None:
    path = save_matrix([[1.0, 2.0], [3.0, 4.5]], tmp_path / "A.json")
    assert path.read_text() == '{"rows":2,"cols":2,"data":[1.0,2.0,3.0,4.5]}\n'


def test_declared_shape_must_match(tmp_path: Path) -> None:
    path = tmp_path / "A.csv"
    path.write_text("3,2\n1,2\n3,4\n")
    with pytest.raises(ShapeMismatchError):
        load_matrix(path)


def test_json_entry_count_must_match(tmp_path: Path) -> None:
    path = tmp_path / "A.json"
    path.write_text(json.dumps({"rows": 2, "cols": 2, "data": [1, 2, 3]}))
    with pytest.raises(ShapeMismatchError):
        load_matrix(path)


def test_malformed_file(tmp_path: Path) -> None:
    path = tmp_path / "A.csv"
    path.write_text("two,two\n")
    with pytest.raises(ValidationError, match="Malformed"):
        load_matrix(path)


def test_unknown_suffix(tmp_path: Path, matrix: np.ndarray) -> None:
    with pytest.raises(ValidationError, match="Unsupported"):
        save_matrix(matrix, tmp_path / "A.txt")
