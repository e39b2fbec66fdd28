"""Exact IR, BIC and revenue audits over enumerable product supports.

Every profile's lottery is computed once and shared by all three audits.
Utilities are evaluated with latent valuations ``v^A``; the interim
expectation over opponents is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from config import AUDIT_TOLERANCE
from distributions import ProductDist, Profile, with_report
from mechanisms.outcomes import Lottery, Mechanism
from mechanisms.valuations import ValuationSpec
from utils import ValidationError, get_logger

logger = get_logger(__name__)

LotteryCache = dict[Profile, Lottery]


def profile_lotteries(M: Mechanism, dist: ProductDist) -> LotteryCache:
    """Lottery of M at every profile of dist (raises TooLargeError past the cap)."""
    if M.n != dist.n:
        raise ValidationError(f"Mechanism has {M.n} bidders, distribution has {dist.n}")
    return {profile: M.lottery(dist.points(profile)) for profile, _ in dist.profiles()}


@dataclass
class InterimTable:
    """Per-bidder interim quantities under truthful opponents.

    Attributes:
        allocation: Per bidder, ``size_i × num_bundles`` probability of
            receiving each bundle when reporting each support point.
        payment: Per bidder, expected payment per report.
        values: Per bidder, ``size_i × num_bundles`` latent values of each type.
    """

    allocation: list[np.ndarray]
    payment: list[np.ndarray]
    values: list[np.ndarray]

    def utility(self, i: int) -> np.ndarray:
        """``U[a, b]``: interim utility of type a reporting b."""
        return self.values[i] @ self.allocation[i].T - self.payment[i][None, :]


def interim_tables(
    M: Mechanism,
    dist: ProductDist,
    vals: ValuationSpec,
    lotteries: LotteryCache | None = None,
) -> InterimTable:
    lotteries = profile_lotteries(M, dist) if lotteries is None else lotteries
    nb = vals.num_bundles
    allocation, payment, values = [], [], []
    for i in range(dist.n):
        size = dist[i].size
        alloc = np.zeros((size, nb))
        pay = np.zeros(size)
        for opponents, q in dist.opponent_profiles(i):
            for b in range(size):
                for r in lotteries[with_report(opponents, i, b)]:
                    alloc[b, r.bundles[i]] += q * r.prob
                    pay[b] += q * r.prob * r.payments[i]
        allocation.append(alloc)
        payment.append(pay)
        values.append(vals.latent_value_matrix(dist[i].support))
    return InterimTable(allocation=allocation, payment=payment, values=values)


def audit_ir(
    M: Mechanism,
    dist: ProductDist,
    vals: ValuationSpec,
    lotteries: LotteryCache | None = None,
) -> float:
    """Largest ex-post IR violation of truthful bidders, ``max(0, −min utility)``.

    Violations up to AUDIT_TOLERANCE are reported as 0.
    """
    lotteries = profile_lotteries(M, dist) if lotteries is None else lotteries
    value_rows = [vals.latent_value_matrix(D.support) for D in dist.dists]
    worst = math.inf
    for profile, lottery in lotteries.items():
        for r in lottery:
            for i, j in enumerate(profile):
                worst = min(worst, float(value_rows[i][j, r.bundles[i]]) - r.payments[i])
    violation = max(0.0, -worst)
    return 0.0 if violation <= AUDIT_TOLERANCE else violation


@dataclass
class BicAudit:
    """Interim regret of every (bidder, type) pair.

    Attributes:
        regrets: Per bidder, regret of each support type (best deviation
            utility minus truthful utility, ≥ 0).
        type_probs: Per bidder, probabilities of the support types.
        eta: Largest regret.
        mu: Largest per-bidder mass of types whose regret exceeds ``threshold``.
        threshold: Regret level used for ``mu``.
        curve: ``(eps, mu_at(eps))`` for each requested eps.
    """

    regrets: list[np.ndarray]
    type_probs: list[np.ndarray]
    eta: float
    mu: float
    threshold: float
    curve: list[tuple[float, float]] = field(default_factory=list)

    def mu_at(self, eps: float) -> float:
        """Largest per-bidder probability of a type with regret above eps."""
        return max(float(q[r > eps].sum()) for r, q in zip(self.regrets, self.type_probs))

    def to_dict(self) -> dict[str, Any]:
        return {
            "eta": self.eta,
            "mu": self.mu,
            "threshold": self.threshold,
            "curve": [{"eps": e, "mu": m} for e, m in self.curve],
            "regrets": [r.tolist() for r in self.regrets],
        }


def audit_bic(
    M: Mechanism,
    dist: ProductDist,
    vals: ValuationSpec,
    eps_grid: Sequence[float] = (),
    threshold: float = AUDIT_TOLERANCE,
    lotteries: LotteryCache | None = None,
) -> BicAudit:
    """Exact interim BIC audit over all types and all in-support misreports."""
    table = interim_tables(M, dist, vals, lotteries)
    regrets = []
    for i in range(dist.n):
        U = table.utility(i)
        regret = U.max(axis=1) - np.diag(U)
        regret[regret <= AUDIT_TOLERANCE] = 0.0
        regrets.append(regret)
    probs = [np.asarray(D.probs) for D in dist.dists]
    eta = max(float(r.max()) for r in regrets)
    audit = BicAudit(regrets=regrets, type_probs=probs, eta=eta, mu=0.0, threshold=threshold)
    audit.mu = audit.mu_at(threshold)
    audit.curve = [(float(e), audit.mu_at(float(e))) for e in eps_grid]
    logger.debug("BIC audit of %s: eta=%.6g mu=%.6g", M.name, audit.eta, audit.mu)
    return audit


@dataclass(frozen=True)
class RevenueEstimate:
    value: float
    stderr: float
    mode: str

    def to_dict(self) -> dict[str, Any]:
        return {"value": self.value, "stderr": self.stderr, "mode": self.mode}


def revenue(
    M: Mechanism,
    dist: ProductDist,
    mode: str = "exact",
    rng: np.random.Generator | None = None,
    samples: int = 1000,
    lotteries: LotteryCache | None = None,
) -> RevenueEstimate:
    """Expected total payment under truthful reports.

    ``exact`` sums over every profile; ``mc`` averages ``samples`` runs of
    ``M.run`` on sampled profiles and reports the standard error.
    """
    if mode == "exact":
        lotteries = profile_lotteries(M, dist) if lotteries is None else lotteries
        total = math.fsum(
            dist.probability(profile) * r.prob * r.revenue
            for profile, lottery in lotteries.items()
            for r in lottery
        )
        return RevenueEstimate(value=total, stderr=0.0, mode=mode)
    if mode == "mc":
        if rng is None:
            raise ValidationError("Monte-Carlo revenue needs a random generator")
        if samples < 2:
            raise ValidationError(f"Monte-Carlo revenue needs at least 2 samples, got {samples}")
        draws = np.array([M.run(dist.sample(rng), rng).revenue for _ in range(samples)])
        return RevenueEstimate(
            value=float(draws.mean()),
            stderr=float(draws.std(ddof=1) / math.sqrt(samples)),
            mode=mode,
        )
    raise ValidationError(f"Unknown revenue mode {mode!r}; choose 'exact' or 'mc'")


@dataclass
class MechanismAudit:
    """IR, BIC and exact revenue of one mechanism on one distribution."""

    ir_violation: float
    bic: BicAudit
    revenue: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "ir_violation": self.ir_violation,
            "eta": self.bic.eta,
            "mu": self.bic.mu,
            "revenue": self.revenue,
            "mu_curve": [{"eps": e, "mu": m} for e, m in self.bic.curve],
        }


def audit_mechanism(
    M: Mechanism,
    dist: ProductDist,
    vals: ValuationSpec,
    eps_grid: Sequence[float] = (),
) -> MechanismAudit:
    lotteries = profile_lotteries(M, dist)
    return MechanismAudit(
        ir_violation=audit_ir(M, dist, vals, lotteries),
        bic=audit_bic(M, dist, vals, eps_grid, lotteries=lotteries),
        revenue=revenue(M, dist, "exact", lotteries=lotteries).value,
    )
