"""Lookup-table mechanisms over a finite product of report supports."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from distributions import ProductDist, Profile
from mechanisms.outcomes import Lottery, Mechanism, Realization, merge_lottery
from utils import ValidationError, get_logger

logger = get_logger(__name__)


def _profile_key(profile: Profile) -> str:
    return ",".join(str(j) for j in profile)


class MechanismTable(Mechanism):
    """A mechanism given by one lottery per report profile.

    Reports must be support points of the per-bidder distributions; the
    lookup is by exact point equality.
    """

    name = "table"

    def __init__(self, supports: ProductDist, lotteries: dict[Profile, Lottery]) -> None:
        super().__init__(supports.n)
        self.supports = supports
        missing = supports.num_profiles - len(lotteries)
        if missing:
            raise ValidationError(f"Mechanism table is missing {missing} profiles")
        for profile, lottery in lotteries.items():
            total = sum(r.prob for r in lottery)
            if not lottery or abs(total - 1.0) > 1e-9:
                raise ValidationError(f"Lottery at profile {profile} sums to {total}")
            for r in lottery:
                if r.n != self.n:
                    raise ValidationError(f"Outcome at profile {profile} has {r.n} bidders")
                if not r.is_feasible():
                    raise ValidationError(f"Outcome at profile {profile} over-allocates an item")
                if any(x < 0.0 for x in r.payments):
                    raise ValidationError(f"Negative payment at profile {profile}")
        self._lotteries = dict(lotteries)

    @classmethod
    def from_rule(
        cls, supports: ProductDist, rule: Callable[[Profile, list[np.ndarray]], Lottery]
    ) -> MechanismTable:
        """Tabulate ``rule(profile, points)`` over every profile."""
        lotteries = {
            profile: merge_lottery(rule(profile, supports.points(profile)))
            for profile, _ in supports.profiles()
        }
        return cls(supports, lotteries)

    def profile_of(self, reports: Sequence[Any]) -> Profile:
        points = self._check_reports(reports)
        profile = []
        for i, point in enumerate(points):
            j = self.supports[i].index_of(point)
            if j is None:
                raise ValidationError(f"Report of bidder {i} is not a support point of the table")
            profile.append(j)
        return tuple(profile)

    def lottery_at(self, profile: Profile) -> Lottery:
        return self._lotteries[tuple(profile)]

    def lottery(self, reports: Sequence[Any]) -> Lottery:
        return self.lottery_at(self.profile_of(reports))

    def items(self) -> list[tuple[Profile, Lottery]]:
        return list(self._lotteries.items())

    def with_payments(
        self, fn: Callable[[Profile, Realization], tuple[float, ...]]
    ) -> MechanismTable:
        """Same allocations, payments replaced by ``fn(profile, realization)``."""
        lotteries = {
            profile: tuple(
                Realization(r.prob, r.bundles, fn(profile, r), r.excluded) for r in lottery
            )
            for profile, lottery in self._lotteries.items()
        }
        return MechanismTable(self.supports, lotteries)

    def to_dict(self) -> dict[str, Any]:
        return {
            "supports": self.supports.to_dict(),
            "outcomes": {
                _profile_key(profile): [r.to_dict() for r in lottery]
                for profile, lottery in self._lotteries.items()
            },
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> MechanismTable:
        try:
            supports = ProductDist.from_dict(data["supports"])
            lotteries = {
                tuple(int(j) for j in key.split(",")): tuple(
                    Realization.from_dict(item) for item in outcomes
                )
                for key, outcomes in data["outcomes"].items()
            }
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"Malformed mechanism table: {exc}") from exc
        return cls(supports, lotteries)


def mechanism_to_dict(table: MechanismTable) -> dict[str, Any]:
    return table.to_dict()


def table_from_dict(data: dict[str, Any]) -> MechanismTable:
    return MechanismTable.from_dict(data)


def load_table(filepath: Path) -> MechanismTable:
    try:
        data = json.loads(Path(filepath).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ValidationError(f"Cannot read mechanism table {filepath}: {exc}") from exc
    return table_from_dict(data)
