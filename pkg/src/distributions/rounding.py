"""Offset grid rounding r(x)_j = max(floor((x_j - ell_j)/delta) * delta + ell_j, 0).

Rounding is computed from integer grid keys so that points rounding to the
same cell compare equal exactly. A relative snap of ``GRID_SNAP`` absorbs
float error, which makes grid points fixed points of the rounding. The key
``-1`` stands for the clamped value 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from distributions.discrete import DiscreteDist
from utils import ValidationError

GRID_SNAP = 1e-9
ZERO_KEY = -1


@dataclass(frozen=True, eq=False)
class RoundingParams:
    """Grid offset ell in [0, delta]^k and grid width delta > 0."""

    ell: np.ndarray
    delta: float

    def __post_init__(self) -> None:
        ell = np.array(self.ell, dtype=float, copy=True).ravel()
        delta = float(self.delta)
        if not delta > 0.0 or not np.isfinite(delta):
            raise ValidationError(f"Grid width must be positive, got {self.delta}")
        if np.any(ell < 0.0) or np.any(ell > delta):
            raise ValidationError("Grid offsets must lie in [0, delta]")
        ell.setflags(write=False)
        object.__setattr__(self, "ell", ell)
        object.__setattr__(self, "delta", delta)

    @property
    def k(self) -> int:
        return int(self.ell.shape[0])

    @property
    def snap(self) -> float:
        """Absolute snap tolerance, ``GRID_SNAP * delta``."""
        return GRID_SNAP * self.delta

    def to_dict(self) -> dict[str, Any]:
        return {"ell": self.ell.tolist(), "delta": self.delta}


def grid_keys(x: Any, rp: RoundingParams) -> np.ndarray:
    """Integer cell coordinates of x; ``ZERO_KEY`` where the rounded value is 0."""
    arr = np.asarray(x, dtype=float).ravel()
    if arr.shape[0] != rp.k:
        raise ValidationError(f"Point has {arr.shape[0]} coordinates, grid has {rp.k}")
    keys = np.floor((arr - rp.ell) / rp.delta + GRID_SNAP).astype(np.int64)
    zero = (keys < 0) | ((keys == 0) & (rp.ell == 0.0))
    keys[zero] = ZERO_KEY
    return keys


def values_from_keys(keys: np.ndarray, rp: RoundingParams) -> np.ndarray:
    """Grid values of cell keys (inverse of :func:`grid_keys` on grid points)."""
    values = keys * rp.delta + rp.ell
    values[keys == ZERO_KEY] = 0.0
    return values


def round_point(x: Any, rp: RoundingParams) -> np.ndarray:
    """Round x down to the (ell, delta) grid; coordinates below the first grid line map to 0."""
    return values_from_keys(grid_keys(x, rp), rp)


def cell_of(w: Any, rp: RoundingParams) -> tuple[np.ndarray, np.ndarray]:
    """Corner and widths of the cube of points that round to the grid point w.

    Along coordinates where w is 0 the cube is ``[0, ell_j)``, or
    ``[0, delta)`` when ell_j is also 0.
    """
    corner = np.asarray(w, dtype=float).ravel().copy()
    zero = corner == 0.0
    widths = np.full(rp.k, rp.delta)
    widths[zero & (rp.ell > 0.0)] = rp.ell[zero & (rp.ell > 0.0)]
    return corner, widths


def round_dist(F: DiscreteDist, rp: RoundingParams) -> DiscreteDist:
    """Pushforward of F under rounding; atoms in one cell are merged exactly."""
    merged: dict[tuple[int, ...], float] = {}
    for point, prob in zip(F.support, F.probs):
        key = tuple(int(v) for v in grid_keys(point, rp))
        merged[key] = merged.get(key, 0.0) + float(prob)
    keys = np.array(list(merged.keys()), dtype=np.int64)
    # Grid values may overshoot 1 by one ulp; support must stay inside the cube.
    support = np.clip(np.vstack([values_from_keys(row.copy(), rp) for row in keys]), 0.0, 1.0)
    probs = np.array(list(merged.values()), dtype=float)
    probs[int(np.argmax(probs))] += 1.0 - float(probs.sum())
    return DiscreteDist(support=support, probs=probs)
