"""Tests for mechanisms.tables."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from distributions import ProductDist
from mechanisms import (
    MechanismTable,
    ValuationSpec,
    deterministic,
    load_table,
    mechanism_to_dict,
    second_price_table,
    table_from_dict,
)
from utils import ValidationError


@pytest.fixture
def auction(toy_product: ProductDist, toy_vals: ValuationSpec) -> MechanismTable:
    return second_price_table(toy_product, toy_vals, item=0, reserve=0.1)


def _flat(toy_product: ProductDist, **overrides) -> dict:
    lotteries = {p: deterministic([0, 0], [0.0, 0.0]) for p, _ in toy_product.profiles()}
    lotteries.update(overrides.get("lotteries", {}))
    return lotteries


def test_lookup_by_support_point(auction: MechanismTable) -> None:
    lottery = auction.lottery([[0.8, 0.6], [0.1, 0.9]])
    assert auction.profile_of([[0.8, 0.6], [0.1, 0.9]]) == (1, 0)
    assert lottery[0].bundles == (1, 0)
    assert lottery[0].payments == pytest.approx((0.42, 0.0))


def test_unknown_report_rejected(auction: MechanismTable) -> None:
    with pytest.raises(ValidationError, match="not a support point"):
        auction.lottery([[0.5, 0.5], [0.1, 0.9]])


def test_missing_profile(toy_product: ProductDist) -> None:
    lotteries = _flat(toy_product)
    del lotteries[(1, 1)]
    with pytest.raises(ValidationError, match="missing 1"):
        MechanismTable(toy_product, lotteries)


@pytest.mark.parametrize(
    "lottery, message",
    [
        (deterministic([1, 1], [0.0, 0.0]), "over-allocates"),
        (deterministic([0, 0], [-0.1, 0.0]), "Negative payment"),
        ((), "sums to"),
    ],
)
def test_invalid_outcomes(toy_product: ProductDist, lottery: tuple, message: str) -> None:
    lotteries = _flat(toy_product, lotteries={(0, 1): lottery})
    with pytest.raises(ValidationError, match=message):
        MechanismTable(toy_product, lotteries)


def test_with_payments_keeps_allocations(auction: MechanismTable) -> None:
    free = auction.with_payments(lambda profile, r: (0.0,) * len(r.payments))
    for (profile, before), (_, after) in zip(auction.items(), free.items()):
        assert [r.bundles for r in before] == [r.bundles for r in after]
        assert all(sum(r.payments) == 0.0 for r in after)


def test_file_round_trip(tmp_path: Path, auction: MechanismTable) -> None:
    path = tmp_path / "table.json"
    path.write_text(json.dumps(mechanism_to_dict(auction)))
    loaded = load_table(path)
    assert loaded.items() == auction.items()
    assert set(auction.to_dict()["outcomes"]) == {"0,0", "0,1", "1,0", "1,1"}
    np.testing.assert_array_equal(loaded.supports[0].support, auction.supports[0].support)


def test_malformed_tables(tmp_path: Path) -> None:
    with pytest.raises(ValidationError, match="Malformed"):
        table_from_dict({"outcomes": {}})
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ValidationError, match="Cannot read"):
        load_table(path)
