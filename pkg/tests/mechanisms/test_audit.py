"""Tests for mechanisms.audit."""

from __future__ import annotations

import numpy as np
import pytest

from distributions import DiscreteDist, ProductDist
from mechanisms import (
    MechanismTable,
    ValuationSpec,
    audit_bic,
    audit_ir,
    audit_mechanism,
    deterministic,
    interim_tables,
    revenue,
    second_price_table,
)
from utils import ValidationError


@pytest.fixture
def auction(toy_product: ProductDist, toy_vals: ValuationSpec) -> MechanismTable:
    return second_price_table(toy_product, toy_vals, item=0, reserve=0.1)


@pytest.fixture
def single(toy_dists: list[DiscreteDist]) -> ProductDist:
    return ProductDist.of([toy_dists[1]])


@pytest.fixture
def fee_table(single: ProductDist) -> MechanismTable:
    """One bidder; type 0 pays 0.3 for nothing, type 1 pays nothing."""
    return MechanismTable(
        single,
        {(0,): deterministic([0], [0.3]), (1,): deterministic([0], [0.0])},
    )


class TestSecondPrice:
    def test_truthful_and_individually_rational(
        self, auction: MechanismTable, toy_product: ProductDist, toy_vals: ValuationSpec
    ) -> None:
        report = audit_mechanism(auction, toy_product, toy_vals, eps_grid=[0.0, 0.1])
        assert report.ir_violation == 0.0
        assert report.bic.eta == 0.0
        assert report.bic.mu == 0.0
        assert report.bic.curve == [(0.0, 0.0), (0.1, 0.0)]

    def test_exact_revenue(self, auction: MechanismTable, toy_product: ProductDist) -> None:
        # Profile probabilities 0.2, 0.3, 0.2, 0.3; prices 0.24, 0.24, 0.42, 0.50.
        assert revenue(auction, toy_product).value == pytest.approx(0.354)

    def test_monte_carlo_revenue(self, auction: MechanismTable, toy_product: ProductDist) -> None:
        est = revenue(auction, toy_product, "mc", np.random.default_rng(3), samples=4000)
        assert est.mode == "mc"
        assert est.value == pytest.approx(0.354, abs=4 * est.stderr)

    def test_interim_allocation_rows_sum_to_one(
        self, auction: MechanismTable, toy_product: ProductDist, toy_vals: ValuationSpec
    ) -> None:
        table = interim_tables(auction, toy_product, toy_vals)
        for alloc in table.allocation:
            np.testing.assert_allclose(alloc.sum(axis=1), 1.0)
        assert table.utility(0).shape == (2, 2)


class TestFlatFee:
    def test_regret_and_failure_mass(
        self, fee_table: MechanismTable, single: ProductDist, toy_vals: ValuationSpec
    ) -> None:
        bic = audit_bic(fee_table, single, toy_vals, eps_grid=[0.1, 0.5])
        np.testing.assert_allclose(bic.regrets[0], [0.3, 0.0])
        assert bic.eta == pytest.approx(0.3)
        assert bic.mu == pytest.approx(0.4)
        assert bic.curve == [(0.1, pytest.approx(0.4)), (0.5, 0.0)]

    def test_ir_violation(
        self, fee_table: MechanismTable, single: ProductDist, toy_vals: ValuationSpec
    ) -> None:
        assert audit_ir(fee_table, single, toy_vals) == pytest.approx(0.3)


def test_revenue_argument_checks(auction: MechanismTable, toy_product: ProductDist) -> None:
    with pytest.raises(ValidationError, match="random generator"):
        revenue(auction, toy_product, "mc")
    with pytest.raises(ValidationError, match="at least 2"):
        revenue(auction, toy_product, "mc", np.random.default_rng(0), samples=1)
    with pytest.raises(ValidationError, match="Unknown revenue mode"):
        revenue(auction, toy_product, "bootstrap")


def test_bidder_count_checked(
    auction: MechanismTable, single: ProductDist, toy_vals: ValuationSpec
) -> None:
    with pytest.raises(ValidationError, match="2 bidders"):
        audit_ir(auction, single, toy_vals)
