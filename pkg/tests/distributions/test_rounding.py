"""Tests for distributions.rounding."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distributions import DiscreteDist, RoundingParams, cell_of, grid_keys, round_dist, round_point
from distributions.rounding import ZERO_KEY
from utils import ValidationError

_unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@st.composite
def grids(draw: st.DrawFn, k: int = 3) -> RoundingParams:
    delta = draw(st.floats(min_value=0.01, max_value=0.5))
    fractions = draw(st.lists(_unit, min_size=k, max_size=k))
    return RoundingParams(ell=np.array(fractions) * delta, delta=delta)


def test_rounds_down_to_offset_grid() -> None:
    rp = RoundingParams(ell=[0.1], delta=0.2)
    assert round_point([0.73], rp) == pytest.approx([0.7])
    assert round_point([0.05], rp) == pytest.approx([0.0])
    assert grid_keys([0.05], rp)[0] == ZERO_KEY


def test_negative_coordinates_round_to_zero() -> None:
    rp = RoundingParams(ell=[0.05, 0.0], delta=0.1)
    np.testing.assert_array_equal(round_point([-0.3, -1e-12], rp), [0.0, 0.0])
    np.testing.assert_allclose(round_point([-0.01, 0.47], rp), [0.0, 0.4])


def test_grid_points_are_fixed() -> None:
    rp = RoundingParams(ell=[0.1, 0.0], delta=0.2)
    for x in ([0.3, 0.4], [0.7, 0.6], [0.1, 0.0]):
        np.testing.assert_allclose(round_point(x, rp), np.array(x), atol=1e-12)


def test_params_validation() -> None:
    with pytest.raises(ValidationError):
        RoundingParams(ell=[0.3], delta=0.2)
    with pytest.raises(ValidationError):
        RoundingParams(ell=[0.0], delta=0.0)
    assert RoundingParams(ell=[0.0], delta=0.5).snap == pytest.approx(5e-10)


def test_cell_of_zero_coordinate() -> None:
    rp = RoundingParams(ell=[0.05, 0.0], delta=0.2)
    corner, widths = cell_of([0.0, 0.0], rp)
    np.testing.assert_array_equal(corner, [0.0, 0.0])
    np.testing.assert_allclose(widths, [0.05, 0.2])


def test_round_dist_merges_cell_mates() -> None:
    F = DiscreteDist(
        support=np.array([[0.71, 0.5], [0.79, 0.5], [0.2, 0.2]]),
        probs=np.array([0.25, 0.25, 0.5]),
    )
    R = round_dist(F, RoundingParams(ell=[0.1, 0.1], delta=0.2))
    assert R.size == 2
    assert R.probs.sum() == 1.0
    idx = R.index_of(round_point([0.71, 0.5], RoundingParams(ell=[0.1, 0.1], delta=0.2)))
    assert idx is not None
    assert R.probs[idx] == pytest.approx(0.5)


@settings(max_examples=200, deadline=None)
@given(x=st.lists(_unit, min_size=3, max_size=3), rp=grids())
def test_rounding_is_close_and_idempotent(x: list[float], rp: RoundingParams) -> None:
    r = round_point(x, rp)
    assert np.all(r <= np.array(x) + rp.snap)
    assert np.max(np.abs(np.array(x) - r)) <= rp.delta * (1.0 + 1e-9)
    np.testing.assert_array_equal(round_point(r, rp), r)


@settings(max_examples=200, deadline=None)
@given(x=st.lists(_unit, min_size=3, max_size=3), rp=grids())
def test_point_lies_in_its_cell(x: list[float], rp: RoundingParams) -> None:
    corner, widths = cell_of(round_point(x, rp), rp)
    arr = np.array(x)
    assert np.all(arr >= corner - rp.snap)
    assert np.all(arr < corner + widths + rp.snap)
