"""Tests for mechanisms.outcomes."""

from __future__ import annotations

from typing import Any, Sequence

import numpy as np
import pytest

from mechanisms import Lottery, Mechanism, Realization, deterministic, discount, draw, merge_lottery
from utils import ValidationError


class FixedMechanism(Mechanism):
    name = "fixed"

    def __init__(self, lottery: Lottery) -> None:
        super().__init__(lottery[0].n)
        self._lottery = lottery

    def lottery(self, reports: Sequence[Any]) -> Lottery:
        self._check_reports(reports)
        return self._lottery


def test_realization_defaults() -> None:
    r = Realization(1.0, (1, 2), (0.3, 0.2))
    assert r.excluded == (False, False)
    assert r.revenue == pytest.approx(0.5)
    assert r.is_feasible()
    assert Realization.from_dict(r.to_dict()) == r


def test_overlapping_bundles_infeasible() -> None:
    assert not Realization(1.0, (0b11, 0b10), (0.0, 0.0)).is_feasible()


def test_length_checks() -> None:
    with pytest.raises(ValidationError):
        Realization(1.0, (1, 2), (0.3,))
    with pytest.raises(ValidationError):
        Realization(1.0, (1,), (0.3,), (False, True))


def test_merge_lottery_sums_identical_outcomes() -> None:
    a = Realization(0.25, (1, 0), (0.5, 0.0))
    b = Realization(0.5, (0, 1), (0.0, 0.5))
    merged = merge_lottery([a, b, Realization(0.25, (1, 0), (0.5, 0.0))])
    assert len(merged) == 2
    assert merged[0].prob == pytest.approx(0.5)
    assert merged[0].bundles == (1, 0)


def test_draw_frequencies() -> None:
    lottery = (Realization(0.2, (1,), (0.0,)), Realization(0.8, (0,), (0.0,)))
    gen = np.random.default_rng(0)
    hits = sum(draw(lottery, gen).bundles == (1,) for _ in range(5000))
    assert hits / 5000 == pytest.approx(0.2, abs=0.02)


def test_discount_clamps_at_zero() -> None:
    assert discount([0.5, 0.05], 0.1) == pytest.approx((0.4, 0.0))


def test_mechanism_interface() -> None:
    M = FixedMechanism(deterministic([1, 0], [0.2, 0.0]))
    assert M.depth == 0
    assert M.inner is None
    assert M.run([[0.1], [0.2]], np.random.default_rng(0)).payments == (0.2, 0.0)
    with pytest.raises(ValidationError, match="expects 2 reports"):
        M.lottery([[0.1]])
    with pytest.raises(ValidationError, match="at least one bidder"):
        Mechanism.__init__(M, 0)
