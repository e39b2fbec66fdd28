"""Norm indices and ℓp norms."""

from __future__ import annotations

import math
from typing import Union

import numpy as np

from utils import ValidationError

NormIndex = Union[int, float]
"""An integer ``p >= 1`` or ``math.inf``."""


def normalize_norm_index(p: int | float | str) -> NormIndex:
    """Parse a norm index.

    Accepts integers ``>= 1``, integral floats, ``math.inf`` and the strings
    ``"inf"``/``"infinity"`` (any case) or decimal integers.

    Raises:
        ValidationError: For fractional, non-positive or unparsable values.
    """
    if isinstance(p, str):
        text = p.strip().lower()
        if text in ("inf", "infinity"):
            return math.inf
        try:
            p = int(text)
        except ValueError as exc:
            raise ValidationError(
                f"Norm index must be an integer >= 1 or 'inf', got {p!r}"
            ) from exc
    if isinstance(p, bool):
        raise ValidationError("Norm index must be an integer >= 1 or 'inf'")
    if isinstance(p, (float, np.floating)):
        if math.isinf(p) and p > 0:
            return math.inf
        if not float(p).is_integer():
            raise ValidationError(f"Norm index must be an integer >= 1 or 'inf', got {p}")
        p = int(p)
    if not isinstance(p, (int, np.integer)) or p < 1:
        raise ValidationError(f"Norm index must be an integer >= 1 or 'inf', got {p!r}")
    return int(p)


def format_norm_index(p: NormIndex) -> int | str:
    """Return the JSON form of a norm index (``"inf"`` or an integer)."""
    return "inf" if math.isinf(p) else int(p)


def lp_norm(x: np.ndarray, p: NormIndex) -> float:
    """ℓp norm of the flattened array *x*."""
    return float(np.linalg.norm(np.ravel(np.asarray(x, dtype=float)), ord=p))


def lp_norm_rows(x: np.ndarray, p: NormIndex) -> np.ndarray:
    """ℓp norm of every row of a 2-D array."""
    return np.linalg.norm(np.asarray(x, dtype=float), ord=p, axis=1)


def root_k(k: int, p: NormIndex) -> float:
    """``k ** (1/p)``, the ℓp norm of the all-ones k-vector (1 when p is inf)."""
    return 1.0 if math.isinf(p) else float(k) ** (1.0 / p)


def dual_root_k(k: int, p: NormIndex) -> float:
    """``k ** (1 - 1/p)``, the ℓ1-to-ℓp conversion factor (k when p is inf)."""
    return float(k) if math.isinf(p) else float(k) ** (1.0 - 1.0 / p)
