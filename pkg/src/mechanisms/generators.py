"""Base mechanism tables M̂ for experiments.

Two generators are shipped: a single-item second-price auction with reserve
(dominant-strategy truthful, hence BIC and IR) and a random serial
dictatorship menu whose payments are distorted at random and then repaired
to BIC and IR by a per-bidder payment-scaling LP.
"""

from __future__ import annotations

import itertools
from typing import Any

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from config import MECHANISM_KINDS
from distributions import ProductDist, Profile
from mechanisms.audit import interim_tables, profile_lotteries
from mechanisms.outcomes import Lottery, Realization, deterministic
from mechanisms.tables import MechanismTable
from mechanisms.valuations import ValuationSpec
from utils import InfeasibleError, SolverFailedError, ValidationError, get_logger

logger = get_logger(__name__)

_MAX_ORDERS = 24


def second_price_table(
    dists: ProductDist,
    vals: ValuationSpec,
    item: int = 0,
    reserve: float = 0.0,
) -> MechanismTable:
    """Second-price auction for one item with a reserve, over latent reports.

    The highest bidder (lowest index on ties) wins if their value reaches the
    reserve and pays ``max(second highest value, reserve)``.
    """
    if not 0 <= item < vals.items:
        raise ValidationError(f"item must be in [0, {vals.items}), got {item}")
    if reserve < 0.0:
        raise ValidationError(f"reserve must be nonnegative, got {reserve}")
    bundle = 1 << item
    value_rows = [vals.latent_value_matrix(D.support)[:, bundle] for D in dists.dists]

    def rule(profile: Profile, _points: list[np.ndarray]) -> Lottery:
        bids = np.array([value_rows[i][j] for i, j in enumerate(profile)])
        bundles = [0] * dists.n
        payments = [0.0] * dists.n
        winner = int(np.argmax(bids))
        if bids[winner] >= reserve:
            others = np.delete(bids, winner)
            bundles[winner] = bundle
            payments[winner] = max(float(others.max()) if others.size else 0.0, reserve)
        return deterministic(bundles, payments)

    return MechanismTable.from_rule(dists, rule)


def _best_bundle(values: np.ndarray, prices: np.ndarray, remaining: int) -> int:
    best, best_utility = 0, 0.0
    for bundle in range(1, values.shape[0]):
        if bundle & ~remaining:
            continue
        utility = values[bundle] - prices[bundle]
        if utility > best_utility:
            best, best_utility = bundle, utility
    return best


def random_menu_table(
    dists: ProductDist,
    vals: ValuationSpec,
    rng: np.random.Generator,
    repair: bool = True,
) -> MechanismTable:
    """Serial dictatorship with random additive posted prices.

    Item prices are drawn from U[0, 0.5]. Bidders pick a utility-maximizing
    bundle among the remaining items, in a uniformly random order (all
    orders for n ≤ 4, else a fixed sample of orders). Each payment is then
    inflated by a factor ``1 + u`` with u ~ U[0, 0.5] drawn per (bidder,
    reported type), which breaks incentive compatibility; ``repair=True``
    restores it with :func:`repair_payments`.
    """
    n, nb = dists.n, vals.num_bundles
    item_prices = rng.uniform(0.0, 0.5, size=vals.items)
    bundle_prices = np.array(
        [sum(item_prices[j] for j in range(vals.items) if b >> j & 1) for b in range(nb)]
    )
    if n <= 4:
        orders = list(itertools.permutations(range(n)))
    else:
        orders = [tuple(int(x) for x in rng.permutation(n)) for _ in range(_MAX_ORDERS)]
    inflation = [rng.uniform(0.0, 0.5, size=D.size) for D in dists.dists]
    value_rows = [vals.latent_value_matrix(D.support) for D in dists.dists]
    weight = 1.0 / len(orders)

    def rule(profile: Profile, _points: list[np.ndarray]) -> Lottery:
        outcomes = []
        for order in orders:
            remaining = nb - 1
            bundles = [0] * n
            for i in order:
                bundles[i] = _best_bundle(value_rows[i][profile[i]], bundle_prices, remaining)
                remaining &= ~bundles[i]
            payments = tuple(
                float(bundle_prices[bundles[i]]) * (1.0 + float(inflation[i][profile[i]]))
                for i in range(n)
            )
            outcomes.append(Realization(weight, tuple(bundles), payments))
        return tuple(outcomes)

    table = MechanismTable.from_rule(dists, rule)
    return repair_payments(table, vals) if repair else table


def repair_payments(table: MechanismTable, vals: ValuationSpec) -> MechanismTable:
    """Scale each bidder's payments per reported type to restore BIC and IR.

    For bidder i the LP picks λ_b ∈ [0, ub_b] per report b maximizing
    Σ_b q(b) λ_b P(b) subject to interim BIC
    ``λ_a P(a) − λ_b P(b) ≤ V(a, a) − V(a, b)``; ``ub_b`` keeps every
    scaled ex-post payment at most the truthful value.

    Raises:
        InfeasibleError: If no scaling is BIC for some bidder.
    """
    dists = table.supports
    lotteries = profile_lotteries(table, dists)
    interim = interim_tables(table, dists, vals, lotteries)
    value_rows = interim.values
    scales: list[np.ndarray] = []
    for i in range(dists.n):
        size = dists[i].size
        V = value_rows[i] @ interim.allocation[i].T
        P = interim.payment[i]
        ub = np.ones(size)
        for profile, lottery in lotteries.items():
            b = profile[i]
            for r in lottery:
                pay = r.payments[i]
                if pay > 0.0:
                    ub[b] = min(ub[b], value_rows[i][b, r.bundles[i]] / pay)
        rows, cols, data, rhs = [], [], [], []
        for row, (a, b) in enumerate((a, b) for a in range(size) for b in range(size) if a != b):
            rows += [row, row]
            cols += [a, b]
            data += [P[a], -P[b]]
            rhs.append(V[a, a] - V[a, b])
        a_ub = sparse.csr_matrix((data, (rows, cols)), shape=(len(rhs), size)) if rhs else None
        res = linprog(
            -np.asarray(dists[i].probs) * P,
            A_ub=a_ub,
            b_ub=np.array(rhs) if rhs else None,
            bounds=list(zip(np.zeros(size), np.maximum(ub, 0.0))),
            method="highs",
        )
        if res.status == 2:
            raise InfeasibleError(f"No BIC payment scaling exists for bidder {i}")
        if res.status != 0:
            raise SolverFailedError(f"Payment repair LP failed: {res.message}", status=res.status)
        scales.append(np.minimum(np.asarray(res.x, dtype=float), ub))
        logger.debug("Bidder %d payment scales: %s", i, np.round(scales[-1], 6).tolist())

    def repaired(profile: Profile, r: Realization) -> tuple[float, ...]:
        return tuple(
            min(float(scales[i][j]) * r.payments[i], float(value_rows[i][j, r.bundles[i]]))
            if r.payments[i] > 0.0
            else 0.0
            for i, j in enumerate(profile)
        )

    return table.with_payments(repaired)


def build_base_mechanism(
    kind: str,
    dists: ProductDist,
    vals: ValuationSpec,
    rng: np.random.Generator,
    **options: Any,
) -> MechanismTable:
    """Dispatch to a generator by name (``second_price`` or ``random_menu``)."""
    if kind == "second_price":
        return second_price_table(
            dists,
            vals,
            item=int(options.get("item", 0)),
            reserve=float(options.get("reserve", 0.0)),
        )
    if kind == "random_menu":
        return random_menu_table(dists, vals, rng)
    raise ValidationError(f"Unknown mechanism kind {kind!r}; choose from {MECHANISM_KINDS}")
