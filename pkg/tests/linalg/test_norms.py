"""Tests for linalg.norms."""

from __future__ import annotations

import math

import numpy as np
import pytest

from linalg.norms import (
    dual_root_k,
    format_norm_index,
    lp_norm,
    lp_norm_rows,
    normalize_norm_index,
    root_k,
)
from utils import ValidationError


class TestNormalizeNormIndex:
    @pytest.mark.parametrize(
        "raw, expected",
        [(1, 1), (3, 3), (2.0, 2), ("4", 4), (" inf ", math.inf), ("Infinity", math.inf)],
    )
    def test_accepted(self, raw: object, expected: float) -> None:
        assert normalize_norm_index(raw) == expected

    def test_math_inf(self) -> None:
        assert math.isinf(normalize_norm_index(math.inf))

    @pytest.mark.parametrize("raw", [0, -2, 2.5, "1.5", "two", True, float("-inf")])
    def test_rejected(self, raw: object) -> None:
        with pytest.raises(ValidationError):
            normalize_norm_index(raw)


def test_format_norm_index() -> None:
    assert format_norm_index(math.inf) == "inf"
    assert format_norm_index(3) == 3


def test_lp_norm_matches_numpy() -> None:
    x = np.array([3.0, -4.0, 1.0])
    assert lp_norm(x, 1) == pytest.approx(8.0)
    assert lp_norm(x, 2) == pytest.approx(math.sqrt(26.0))
    assert lp_norm(x, math.inf) == pytest.approx(4.0)


def test_lp_norm_rows() -> None:
    rows = np.array([[3.0, 4.0], [0.0, -2.0]])
    np.testing.assert_allclose(lp_norm_rows(rows, 2), [5.0, 2.0])


def test_root_k_and_dual() -> None:
    assert root_k(4, 2) == pytest.approx(2.0)
    assert dual_root_k(4, 2) == pytest.approx(2.0)
    assert root_k(8, 3) == pytest.approx(2.0)
    assert root_k(5, math.inf) == 1.0
    assert dual_root_k(5, math.inf) == 5.0
    assert dual_root_k(7, 1) == 1.0
