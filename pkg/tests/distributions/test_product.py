"""Tests for distributions.product."""

from __future__ import annotations

import numpy as np
import pytest

from distributions import ProductDist, with_report
from utils import TooLargeError, ValidationError


def test_profiles_enumerated_lexicographically(toy_product: ProductDist) -> None:
    profiles = list(toy_product.profiles())
    assert [p for p, _ in profiles] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert sum(prob for _, prob in profiles) == pytest.approx(1.0)
    assert profiles[1][1] == pytest.approx(0.5 * 0.6)


def test_opponent_profiles(toy_product: ProductDist) -> None:
    others = list(toy_product.opponent_profiles(0))
    assert [p for p, _ in others] == [(-1, 0), (-1, 1)]
    np.testing.assert_allclose([prob for _, prob in others], [0.4, 0.6])


def test_sizes_and_points(toy_product: ProductDist) -> None:
    assert toy_product.n == len(toy_product) == 2
    assert toy_product.sizes == (2, 2)
    assert toy_product.num_profiles == 4
    points = toy_product.points((1, 0))
    np.testing.assert_array_equal(points[0], [0.8, 0.6])
    np.testing.assert_array_equal(points[1], [0.1, 0.9])


def test_enumeration_cap(toy_product: ProductDist, monkeypatch: pytest.MonkeyPatch) -> None:
    with pytest.raises(TooLargeError):
        toy_product.require_enumerable(cap=3)
    monkeypatch.setenv("AUDIT_MAX_PROFILES", "2")
    with pytest.raises(TooLargeError):
        list(toy_product.profiles())


def test_sample_profile_in_range(toy_product: ProductDist, rng: np.random.Generator) -> None:
    for _ in range(10):
        profile = toy_product.sample_profile(rng)
        assert all(0 <= j < 2 for j in profile)
    assert len(toy_product.sample(rng)) == 2


def test_dict_round_trip(toy_product: ProductDist) -> None:
    restored = ProductDist.from_dict(toy_product.to_dict())
    assert restored.sizes == toy_product.sizes
    np.testing.assert_array_equal(restored[1].probs, toy_product[1].probs)


def test_empty_rejected() -> None:
    with pytest.raises(ValidationError):
        ProductDist.of([])


def test_with_report() -> None:
    assert with_report((0, 1, 2), 1, 5) == (0, 5, 2)
