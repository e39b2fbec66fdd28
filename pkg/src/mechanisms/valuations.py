"""Bidder valuations over item bundles, in type space and in latent space.

Bundles are bitmasks over ``items`` goods; bundle 0 is the empty bundle.
A type t lives in [0,1]^d and a latent type z in [0,1]^k, with
``v^A(z, S) = v(Az, S)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from config import VALUATION_FAMILIES
from linalg import ArchetypeMatrix
from utils import ShapeMismatchError, ValidationError


def bundle_items(bundle: int, items: int) -> list[int]:
    """Item indices contained in a bundle bitmask."""
    return [j for j in range(items) if bundle >> j & 1]


@dataclass(frozen=True, eq=False)
class ValuationSpec:
    """A Lipschitz valuation family evaluated through an archetype matrix.

    Families:
        ``additive``: d = items, v(t, S) = Σ_{j ∈ S} t_j, Lipschitz constant items.
        ``table``: d = 2^items − 1, t_{S−1} is the value of bundle S, constant 1.

    Attributes:
        family: ``"additive"`` or ``"table"``.
        items: Number of goods m.
        archetypes: The d × k matrix A mapping latent types to types.
    """

    family: str
    items: int
    archetypes: ArchetypeMatrix

    def __post_init__(self) -> None:
        if self.family not in VALUATION_FAMILIES:
            raise ValidationError(
                f"Unknown valuation family {self.family!r}; choose from {VALUATION_FAMILIES}"
            )
        if int(self.items) < 1:
            raise ValidationError(f"items must be positive, got {self.items}")
        object.__setattr__(self, "items", int(self.items))
        A = ArchetypeMatrix.wrap(self.archetypes)
        object.__setattr__(self, "archetypes", A)
        if A.d != self.d:
            raise ShapeMismatchError(
                f"{self.family} valuations over {self.items} items need d={self.d}, "
                f"archetype matrix has d={A.d}"
            )

    @property
    def d(self) -> int:
        return self.items if self.family == "additive" else (1 << self.items) - 1

    @property
    def k(self) -> int:
        return self.archetypes.k

    @property
    def num_bundles(self) -> int:
        return 1 << self.items

    @property
    def lipschitz(self) -> float:
        """L with |v(t,S) − v(t',S)| ≤ L‖t − t'‖_∞."""
        return float(self.items) if self.family == "additive" else 1.0

    @property
    def a_inf(self) -> float:
        return self.archetypes.inf_norm

    @property
    def latent_lipschitz(self) -> float:
        """k‖A‖_∞L, the ℓ∞ Lipschitz constant of v^A."""
        return self.k * self.a_inf * self.lipschitz

    def bundle_values(self, t: Any) -> np.ndarray:
        """Values of every bundle (index = bitmask) for type t."""
        t = np.asarray(t, dtype=float).ravel()
        if t.shape[0] != self.d:
            raise ShapeMismatchError(f"Type has {t.shape[0]} entries, expected d={self.d}")
        if self.family == "table":
            return np.concatenate([[0.0], t])
        values = np.zeros(self.num_bundles)
        for bundle in range(1, self.num_bundles):
            low = bundle & -bundle
            values[bundle] = values[bundle ^ low] + t[low.bit_length() - 1]
        return values

    def value(self, t: Any, bundle: int) -> float:
        return float(self.bundle_values(t)[bundle])

    def latent_bundle_values(self, z: Any) -> np.ndarray:
        z = np.asarray(z, dtype=float).ravel()
        if z.shape[0] != self.k:
            raise ShapeMismatchError(f"Latent type has {z.shape[0]} entries, expected k={self.k}")
        return self.bundle_values(self.archetypes.data @ z)

    def latent_value(self, z: Any, bundle: int) -> float:
        """v^A(z, S) = v(Az, S)."""
        return float(self.latent_bundle_values(z)[bundle])

    def latent_value_matrix(self, points: np.ndarray) -> np.ndarray:
        """``len(points) × num_bundles`` latent values, one row per point."""
        return np.vstack([self.latent_bundle_values(z) for z in np.atleast_2d(points)])

    def lipschitz_ratio(self, rng: np.random.Generator, pairs: int = 200) -> float:
        """Largest observed |Δv^A| / (k‖A‖_∞L ‖Δz‖_∞) over random latent pairs.

        Values ≤ 1 are consistent with the declared constant.
        """
        worst = 0.0
        bound = self.latent_lipschitz
        for _ in range(pairs):
            z1, z2 = rng.random(self.k), rng.random(self.k)
            gap = float(np.max(np.abs(z1 - z2)))
            if gap == 0.0 or bound == 0.0:
                continue
            diff = np.max(np.abs(self.latent_bundle_values(z1) - self.latent_bundle_values(z2)))
            worst = max(worst, float(diff) / (bound * gap))
        return worst

    def to_dict(self) -> dict[str, Any]:
        return {
            "family": self.family,
            "items": self.items,
            "lipschitz": self.lipschitz,
            "a_inf": self.a_inf,
        }
