"""Product distributions over bidder type profiles."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Any, Iterator, Sequence

import numpy as np

from config import get_env_from_schema
from distributions.discrete import DiscreteDist
from utils import TooLargeError, ValidationError

Profile = tuple[int, ...]
"""A type profile, as one support index per bidder."""


@dataclass(frozen=True)
class ProductDist:
    """Independent per-bidder distributions ``D_1 × ... × D_n``."""

    dists: tuple[DiscreteDist, ...]

    def __post_init__(self) -> None:
        dists = tuple(self.dists)
        if not dists:
            raise ValidationError("A product distribution needs at least one bidder")
        object.__setattr__(self, "dists", dists)

    @classmethod
    def of(cls, dists: Sequence[DiscreteDist]) -> ProductDist:
        return cls(dists=tuple(dists))

    @property
    def n(self) -> int:
        return len(self.dists)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(D.size for D in self.dists)

    @property
    def num_profiles(self) -> int:
        return math.prod(self.sizes)

    def __getitem__(self, i: int) -> DiscreteDist:
        return self.dists[i]

    def __len__(self) -> int:
        return self.n

    def require_enumerable(self, cap: int | None = None) -> None:
        """Raise TooLargeError when the profile count exceeds AUDIT_MAX_PROFILES."""
        limit = int(get_env_from_schema("AUDIT_MAX_PROFILES") if cap is None else cap)
        if self.num_profiles > limit:
            raise TooLargeError(
                f"{self.num_profiles} type profiles exceed the enumeration cap of {limit}"
            )

    def points(self, profile: Profile) -> list[np.ndarray]:
        return [self.dists[i].support[j] for i, j in enumerate(profile)]

    def probability(self, profile: Profile) -> float:
        return math.prod(float(self.dists[i].probs[j]) for i, j in enumerate(profile))

    def profiles(self) -> Iterator[tuple[Profile, float]]:
        """All profiles with their probabilities, in lexicographic index order."""
        self.require_enumerable()
        for profile in itertools.product(*(range(s) for s in self.sizes)):
            yield profile, self.probability(profile)

    def opponent_profiles(self, i: int) -> Iterator[tuple[Profile, float]]:
        """Profiles of everyone but bidder i; position i holds -1."""
        self.require_enumerable()
        ranges = [range(s) if j != i else range(-1, 0) for j, s in enumerate(self.sizes)]
        for profile in itertools.product(*ranges):
            prob = math.prod(
                float(self.dists[j].probs[t]) for j, t in enumerate(profile) if j != i
            )
            yield profile, prob

    def sample_profile(self, rng: np.random.Generator) -> Profile:
        return tuple(int(rng.choice(D.size, p=D.probs)) for D in self.dists)

    def sample(self, rng: np.random.Generator) -> list[np.ndarray]:
        return self.points(self.sample_profile(rng))

    def to_dict(self) -> dict[str, Any]:
        return {"bidders": [D.to_dict() for D in self.dists]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ProductDist:
        return cls.of([DiscreteDist.from_dict(item) for item in data["bidders"]])


def with_report(profile: Profile, i: int, report: int) -> Profile:
    """Copy of profile with bidder i's entry replaced."""
    return profile[:i] + (report,) + profile[i + 1 :]
