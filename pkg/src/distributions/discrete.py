"""Finite-support distributions on the unit cube [0,1]^k."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable

import numpy as np

from utils import BadProbabilitiesError, ShapeMismatchError, ValidationError, get_logger

logger = get_logger(__name__)

_PROB_TOLERANCE = 1e-12


def point_key(x: np.ndarray) -> tuple[float, ...]:
    """Exact hashable key of a point (its float coordinates)."""
    return tuple(float(v) for v in np.ravel(x))


@dataclass(frozen=True, eq=False)
class DiscreteDist:
    """A distribution with finitely many atoms in [0,1]^k.

    Attributes:
        support: ``m × k`` array of pairwise distinct points.
        probs: m positive probabilities summing to 1.
    """

    support: np.ndarray
    probs: np.ndarray

    def __post_init__(self) -> None:
        support = np.array(self.support, dtype=float, copy=True)
        probs = np.array(self.probs, dtype=float, copy=True).ravel()
        if support.ndim != 2 or support.shape[0] == 0 or support.shape[1] == 0:
            raise ShapeMismatchError(
                f"Support must be a non-empty m x k array, got {support.shape}"
            )
        if probs.shape[0] != support.shape[0]:
            raise ShapeMismatchError("Support and probabilities differ in length")
        if not np.all(np.isfinite(support)):
            raise ValidationError("Support has non-finite coordinates")
        if np.any(support < 0.0) or np.any(support > 1.0):
            raise ValidationError("Support points must lie in [0,1]^k")
        if not np.all(np.isfinite(probs)) or np.any(probs <= 0.0):
            raise BadProbabilitiesError("Probabilities must be finite and strictly positive")
        if abs(float(probs.sum()) - 1.0) > _PROB_TOLERANCE:
            raise BadProbabilitiesError(f"Probabilities sum to {probs.sum()!r}, expected 1")
        if np.unique(support, axis=0).shape[0] != support.shape[0]:
            raise ValidationError("Support points must be pairwise distinct")
        support.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_atoms(cls, points: Iterable[Any], weights: Iterable[float]) -> DiscreteDist:
        """Build from possibly repeated atoms; equal points are merged and weights normalized.

        Zero-weight atoms are dropped. First-appearance order is kept.

        Raises:
            BadProbabilitiesError: If a weight is negative or all weights are zero.
        """
        merged: dict[tuple[float, ...], float] = {}
        for point, weight in zip(points, weights):
            w = float(weight)
            if w < 0.0 or not np.isfinite(w):
                raise BadProbabilitiesError(f"Atom weight must be nonnegative, got {w}")
            if w == 0.0:
                continue
            key = point_key(np.asarray(point, dtype=float))
            merged[key] = merged.get(key, 0.0) + w
        total = sum(merged.values())
        if total <= 0.0:
            raise BadProbabilitiesError("Atoms carry no mass")
        support = np.array(list(merged.keys()), dtype=float)
        probs = np.array(list(merged.values()), dtype=float) / total
        return cls(support=support, probs=_renormalize(probs))

    @classmethod
    def point_mass(cls, x: Any) -> DiscreteDist:
        return cls(support=np.atleast_2d(np.asarray(x, dtype=float)), probs=np.ones(1))

    @property
    def k(self) -> int:
        return int(self.support.shape[1])

    @property
    def size(self) -> int:
        return int(self.support.shape[0])

    def index_of(self, x: Any) -> int | None:
        """Index of the atom equal to *x*, or None."""
        key = point_key(np.asarray(x, dtype=float))
        return self._index.get(key)

    @property
    def _index(self) -> dict[tuple[float, ...], int]:
        cached = self.__dict__.get("_index_cache")
        if cached is None:
            cached = {point_key(row): i for i, row in enumerate(self.support)}
            object.__setattr__(self, "_index_cache", cached)
        return cached

    def sample_indices(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.choice(self.size, size=size, replace=True, p=self.probs)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """One draw, as a point."""
        return self.support[int(rng.choice(self.size, p=self.probs))].copy()

    def pushforward(self, fn: Callable[[np.ndarray], Any]) -> DiscreteDist:
        """Distribution of ``fn(x)`` for x from this distribution."""
        return DiscreteDist.from_atoms((fn(row) for row in self.support), self.probs)

    def to_dict(self) -> dict[str, Any]:
        return {"k": self.k, "support": self.support.tolist(), "probs": self.probs.tolist()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> DiscreteDist:
        support = np.asarray(data["support"], dtype=float)
        if support.ndim != 2 or support.shape[1] != int(data["k"]):
            raise ShapeMismatchError(
                f"Declared k={data['k']} but support has shape {support.shape}"
            )
        probs = np.asarray(data["probs"], dtype=float)
        if probs.size and abs(float(probs.sum()) - 1.0) <= 1e-9:
            probs = _renormalize(probs / probs.sum())
        return cls(support=support, probs=probs)


def _renormalize(probs: np.ndarray) -> np.ndarray:
    """Push the rounding error of a normalized vector into its largest entry."""
    probs = probs.copy()
    j = int(np.argmax(probs))
    probs[j] += 1.0 - float(probs.sum())
    return probs


def load_dist(filepath: Path) -> DiscreteDist:
    """Read a ``{"k", "support", "probs"}`` JSON file."""
    try:
        data = json.loads(Path(filepath).read_text(encoding="utf-8"))
        return DiscreteDist.from_dict(data)
    except OSError as exc:
        raise ValidationError(f"Cannot read distribution file {filepath}: {exc}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"Malformed distribution file {filepath}: {exc}") from exc


def save_dist(dist: DiscreteDist, filepath: Path) -> Path:
    filepath = Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    filepath.write_text(json.dumps(dist.to_dict(), indent=2) + "\n", encoding="utf-8")
    logger.info("Distribution with %d atoms written: %s", dist.size, filepath)
    return filepath
