"""Oracle access to a latent prior: conditional cube sampling and closest support point.

A mechanism built on a prior only talks to it through these calls; the
counters on :class:`DistributionOracle` make that checkable.
"""

from __future__ import annotations

import threading
from collections import Counter
from typing import Any

import numpy as np

from distributions.discrete import DiscreteDist
from linalg import NormIndex, lp_norm_rows, normalize_norm_index
from utils import EmptyCubeError, ShapeMismatchError


def _cube_mask(F: DiscreteDist, corner: Any, widths: Any, tol: float) -> np.ndarray:
    corner = np.asarray(corner, dtype=float).ravel()
    widths = np.asarray(widths, dtype=float).ravel()
    if corner.shape[0] != F.k or widths.shape[0] != F.k:
        raise ShapeMismatchError(f"Cube has dimension {corner.shape[0]}, support has k={F.k}")
    lower = corner - tol
    upper = corner + widths - tol
    return np.all((F.support >= lower) & (F.support < upper), axis=1)


def conditional_distribution(
    F: DiscreteDist, corner: Any, widths: Any, tol: float = 0.0
) -> DiscreteDist:
    """F restricted to the half-open cube ``×_j [corner_j - tol, corner_j + widths_j - tol)``.

    Raises:
        EmptyCubeError: If no support point lies in the cube.
    """
    mask = _cube_mask(F, corner, widths, tol)
    if not np.any(mask):
        raise EmptyCubeError(f"No support point in the cube at {np.asarray(corner).tolist()}")
    probs = F.probs[mask]
    probs = probs / probs.sum()
    probs[int(np.argmax(probs))] += 1.0 - float(probs.sum())
    return DiscreteDist(support=F.support[mask], probs=probs)


def conditional_sample(
    F: DiscreteDist,
    corner: Any,
    widths: Any,
    rng: np.random.Generator,
    tol: float = 0.0,
) -> np.ndarray:
    """One draw from F conditioned on the cube (see :func:`conditional_distribution`).

    Raises:
        EmptyCubeError: If no support point lies in the cube.
    """
    return conditional_distribution(F, corner, widths, tol).sample(rng)


def closest_support_index(F: DiscreteDist, x: Any, p: int | float | str) -> int:
    """Index of the support point nearest to x in ℓp; ties go to the lowest index."""
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != F.k:
        raise ShapeMismatchError(f"Point has {x.shape[0]} coordinates, support has k={F.k}")
    return int(np.argmin(lp_norm_rows(F.support - x, normalize_norm_index(p))))


def closest_support_point(F: DiscreteDist, x: Any, p: int | float | str) -> np.ndarray:
    """Support point nearest to x in ℓp (lowest index on ties)."""
    return F.support[closest_support_index(F, x, p)].copy()


class DistributionOracle:
    """Counted oracle handle on a discrete prior.

    Exposes only the two access contracts a mechanism may use, plus the exact
    conditional distribution that exact audits enumerate. Every call is
    counted per method in :attr:`calls`.
    """

    def __init__(self, dist: DiscreteDist, name: str = "") -> None:
        self._dist = dist
        self.name = name
        self.calls: Counter[str] = Counter()
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"DistributionOracle({self.name!r}, atoms={self._dist.size})"

    @property
    def k(self) -> int:
        return self._dist.k

    @property
    def total_calls(self) -> int:
        return sum(self.calls.values())

    def _count(self, method: str) -> None:
        with self._lock:
            self.calls[method] += 1

    def conditional_sample(
        self, corner: Any, widths: Any, rng: np.random.Generator, tol: float = 0.0
    ) -> np.ndarray:
        self._count("conditional_sample")
        return conditional_sample(self._dist, corner, widths, rng, tol)

    def conditional_distribution(self, corner: Any, widths: Any, tol: float = 0.0) -> DiscreteDist:
        self._count("conditional_distribution")
        return conditional_distribution(self._dist, corner, widths, tol)

    def closest_support_point(self, x: Any, p: NormIndex) -> np.ndarray:
        self._count("closest_support_point")
        return closest_support_point(self._dist, x, p)
