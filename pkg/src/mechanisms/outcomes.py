"""Auction outcomes and the mechanism oracle interface.

A mechanism answers a report profile in two ways: ``lottery`` returns the
exact outcome distribution (what audits enumerate) and ``run`` returns one
deterministic instantiation drawn with an explicit generator (what an
auction executes).
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from utils import ValidationError


@dataclass(frozen=True)
class Realization:
    """One outcome with its probability.

    Attributes:
        prob: Probability of this outcome in its lottery.
        bundles: Allocated bundle bitmask per bidder.
        payments: Nonnegative payment per bidder.
        excluded: Bidders dropped by an eligibility test.
    """

    prob: float
    bundles: tuple[int, ...]
    payments: tuple[float, ...]
    excluded: tuple[bool, ...] = ()

    def __post_init__(self) -> None:
        n = len(self.bundles)
        if len(self.payments) != n:
            raise ValidationError("bundles and payments differ in length")
        if not self.excluded:
            object.__setattr__(self, "excluded", (False,) * n)
        elif len(self.excluded) != n:
            raise ValidationError("excluded flags differ in length from bundles")

    @property
    def n(self) -> int:
        return len(self.bundles)

    @property
    def revenue(self) -> float:
        return float(sum(self.payments))

    def is_feasible(self) -> bool:
        """True when no item is given to two bidders."""
        taken = 0
        for bundle in self.bundles:
            if taken & bundle:
                return False
            taken |= bundle
        return True

    def outcome_key(self) -> tuple[Any, ...]:
        return (self.bundles, self.payments, self.excluded)

    def to_dict(self) -> dict[str, Any]:
        return {
            "prob": self.prob,
            "bundles": list(self.bundles),
            "payments": list(self.payments),
            "excluded": list(self.excluded),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Realization:
        return cls(
            prob=float(data["prob"]),
            bundles=tuple(int(b) for b in data["bundles"]),
            payments=tuple(float(x) for x in data["payments"]),
            excluded=tuple(bool(x) for x in data.get("excluded", ())),
        )


Lottery = tuple[Realization, ...]


def deterministic(bundles: Sequence[int], payments: Sequence[float]) -> Lottery:
    return (Realization(1.0, tuple(int(b) for b in bundles), tuple(float(x) for x in payments)),)


def merge_lottery(realizations: Sequence[Realization]) -> Lottery:
    """Sum the probabilities of identical outcomes, keeping first-seen order."""
    merged: dict[tuple[Any, ...], Realization] = {}
    for r in realizations:
        key = r.outcome_key()
        if key in merged:
            prev = merged[key]
            merged[key] = Realization(prev.prob + r.prob, r.bundles, r.payments, r.excluded)
        else:
            merged[key] = r
    return tuple(merged.values())


def map_lottery(lottery: Lottery, fn: Callable[[Realization], Realization]) -> Lottery:
    return merge_lottery([fn(r) for r in lottery])


def draw(lottery: Lottery, rng: np.random.Generator) -> Realization:
    """One realization, sampled by probability."""
    if len(lottery) == 1:
        return lottery[0]
    probs = np.array([r.prob for r in lottery], dtype=float)
    return lottery[int(rng.choice(len(lottery), p=probs / probs.sum()))]


def discount(payments: Sequence[float], amount: float) -> tuple[float, ...]:
    """``max(0, p − amount)`` per bidder."""
    return tuple(max(0.0, float(x) - amount) for x in payments)


class Mechanism(ABC):
    """A sealed-bid mechanism over n bidders' latent reports."""

    name: str = "mechanism"

    def __init__(self, n: int) -> None:
        if n < 1:
            raise ValidationError(f"A mechanism needs at least one bidder, got {n}")
        self.n = n

    def _check_reports(self, reports: Sequence[Any]) -> list[np.ndarray]:
        if len(reports) != self.n:
            raise ValidationError(f"{self.name} expects {self.n} reports, got {len(reports)}")
        return [np.asarray(r, dtype=float).ravel() for r in reports]

    @abstractmethod
    def lottery(self, reports: Sequence[Any]) -> Lottery:
        """Exact outcome distribution for a report profile."""

    def run(self, reports: Sequence[Any], rng: np.random.Generator) -> Realization:
        """One deterministic instantiation of the outcome."""
        return draw(self.lottery(reports), rng)

    @property
    def inner(self) -> Mechanism | None:
        return None

    @property
    def depth(self) -> int:
        """Number of transforms stacked on top of the base mechanism."""
        inner = self.inner
        return 0 if inner is None else 1 + inner.depth

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n})"
