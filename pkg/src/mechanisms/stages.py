"""The three transforms that make a base mechanism robust to prior error.

Each stage wraps an inner mechanism, rewrites the reports, and discounts
payments by the most a bidder's value can move under the rewrite, with
payments clamped at 0. Stages only touch the model prior through
:class:`~distributions.oracle.DistributionOracle` handles.
"""

from __future__ import annotations

import itertools
import math
from typing import Any, Sequence

import numpy as np

from distributions import (
    DistributionOracle,
    RoundingParams,
    cell_of,
    round_point,
)
from linalg import NormIndex, lp_norm, normalize_norm_index, root_k
from mechanisms.outcomes import Lottery, Mechanism, Realization, discount, merge_lottery
from utils import ValidationError, get_logger

logger = get_logger(__name__)


def _check_oracles(oracles: Sequence[DistributionOracle], n: int, rp: RoundingParams) -> None:
    if len(oracles) != n:
        raise ValidationError(f"Expected {n} prior oracles, got {len(oracles)}")
    for oracle in oracles:
        if oracle.k != rp.k:
            raise ValidationError(f"Prior dimension {oracle.k} differs from grid dimension {rp.k}")


class RoundDownMechanism(Mechanism):
    """Runs the base mechanism on a resample of the model prior inside each bid's grid cell.

    A bid w (a rounded point) is replaced by a draw from the model prior
    conditioned on the cube of points that round to w; payments drop by
    ``k‖A‖_∞Lδ``.
    """

    name = "round_down"

    def __init__(
        self,
        base: Mechanism,
        oracles: Sequence[DistributionOracle],
        rp: RoundingParams,
        lipschitz: float,
    ) -> None:
        super().__init__(base.n)
        _check_oracles(oracles, base.n, rp)
        self.base = base
        self.oracles = tuple(oracles)
        self.rp = rp
        self.discount = lipschitz * rp.delta

    @property
    def inner(self) -> Mechanism:
        return self.base

    def lottery(self, reports: Sequence[Any]) -> Lottery:
        bids = self._check_reports(reports)
        conditionals = [
            oracle.conditional_distribution(*cell_of(w, self.rp), tol=self.rp.snap)
            for oracle, w in zip(self.oracles, bids)
        ]
        outcomes = []
        for combo in itertools.product(*(range(C.size) for C in conditionals)):
            prob = math.prod(float(C.probs[j]) for C, j in zip(conditionals, combo))
            points = [C.support[j] for C, j in zip(conditionals, combo)]
            for r in self.base.lottery(points):
                outcomes.append(
                    Realization(
                        prob * r.prob, r.bundles, discount(r.payments, self.discount), r.excluded
                    )
                )
        return merge_lottery(outcomes)

    def run(self, reports: Sequence[Any], rng: np.random.Generator) -> Realization:
        bids = self._check_reports(reports)
        resampled = [
            oracle.conditional_sample(*cell_of(w, self.rp), rng, tol=self.rp.snap)
            for oracle, w in zip(self.oracles, bids)
        ]
        r = self.base.run(resampled, rng)
        return Realization(1.0, r.bundles, discount(r.payments, self.discount), r.excluded)


class TVRobustMechanism(Mechanism):
    """Maps each report to the rounded model-prior support and drops far-off bidders.

    A report w is mapped to ``w' = round(closest support point of the
    model prior to w)``. Bidders with ``‖w − w'‖_p ≤ ζ + δk^{1/p}`` keep the
    inner outcome with payments lowered by ``k‖A‖_∞L(ζ + δk^{1/p})``; the
    others are excluded (empty bundle, zero payment).
    """

    name = "tv_robust"

    def __init__(
        self,
        inner: Mechanism,
        oracles: Sequence[DistributionOracle],
        zeta: float,
        rp: RoundingParams,
        p: NormIndex,
        lipschitz: float,
    ) -> None:
        super().__init__(inner.n)
        _check_oracles(oracles, inner.n, rp)
        if zeta < 0.0:
            raise ValidationError(f"zeta must be nonnegative, got {zeta}")
        self._inner = inner
        self.oracles = tuple(oracles)
        self.rp = rp
        self.p = normalize_norm_index(p)
        self.zeta = float(zeta)
        self.threshold = self.zeta + rp.delta * root_k(rp.k, self.p)
        self.discount = lipschitz * self.threshold

    @property
    def inner(self) -> Mechanism:
        return self._inner

    def map_reports(self, reports: Sequence[Any]) -> tuple[list[np.ndarray], list[bool]]:
        """Mapped reports and per-bidder eligibility."""
        bids = self._check_reports(reports)
        mapped, eligible = [], []
        for oracle, w in zip(self.oracles, bids):
            target = round_point(oracle.closest_support_point(w, self.p), self.rp)
            mapped.append(target)
            eligible.append(lp_norm(w - target, self.p) <= self.threshold)
        return mapped, eligible

    def _apply(self, r: Realization, eligible: list[bool]) -> Realization:
        bundles = tuple(b if ok else 0 for b, ok in zip(r.bundles, eligible))
        payments = tuple(
            max(0.0, x - self.discount) if ok else 0.0 for x, ok in zip(r.payments, eligible)
        )
        excluded = tuple(ex or not ok for ex, ok in zip(r.excluded, eligible))
        return Realization(r.prob, bundles, payments, excluded)

    def lottery(self, reports: Sequence[Any]) -> Lottery:
        mapped, eligible = self.map_reports(reports)
        return merge_lottery([self._apply(r, eligible) for r in self._inner.lottery(mapped)])

    def run(self, reports: Sequence[Any], rng: np.random.Generator) -> Realization:
        mapped, eligible = self.map_reports(reports)
        if not all(eligible):
            logger.debug("Excluded bidders: %s", [i for i, ok in enumerate(eligible) if not ok])
        return self._apply(self._inner.run(mapped, rng), eligible)


class RoundUpMechanism(Mechanism):
    """Rounds every report down to the (ell, δ) grid and discounts ``k‖A‖_∞Lδ``."""

    name = "round_up"

    def __init__(self, inner: Mechanism, rp: RoundingParams, lipschitz: float) -> None:
        super().__init__(inner.n)
        self._inner = inner
        self.rp = rp
        self.discount = lipschitz * rp.delta

    @property
    def inner(self) -> Mechanism:
        return self._inner

    def _round(self, reports: Sequence[Any]) -> list[np.ndarray]:
        return [round_point(x, self.rp) for x in self._check_reports(reports)]

    def _apply(self, r: Realization) -> Realization:
        return Realization(r.prob, r.bundles, discount(r.payments, self.discount), r.excluded)

    def lottery(self, reports: Sequence[Any]) -> Lottery:
        return merge_lottery([self._apply(r) for r in self._inner.lottery(self._round(reports))])

    def run(self, reports: Sequence[Any], rng: np.random.Generator) -> Realization:
        return self._apply(self._inner.run(self._round(reports), rng))
