"""Dense matrix primitives: validation, numerical rank and orthonormal bases."""

from __future__ import annotations

from typing import Any

import numpy as np
from scipy import linalg as sla

from config import get_env_from_schema
from utils import RankDeficientError, ShapeMismatchError, ValidationError


def as_matrix(A: Any) -> np.ndarray:
    """Return *A* as a finite float64 ``d × k`` array with ``d >= k >= 1``.

    Objects implementing ``__array__`` (such as ``ArchetypeMatrix``) are accepted.

    Raises:
        ShapeMismatchError: If *A* is not 2-D or has more columns than rows.
        ValidationError: If *A* has non-finite entries.
    """
    arr = np.asarray(A, dtype=float)
    if arr.ndim != 2:
        raise ShapeMismatchError(f"Expected a 2-D matrix, got shape {arr.shape}")
    d, k = arr.shape
    if k < 1 or d < k:
        raise ShapeMismatchError(f"Expected d >= k >= 1, got d={d}, k={k}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("Matrix has non-finite entries")
    return arr


def as_vector(b: Any, length: int | None = None) -> np.ndarray:
    """Return *b* as a finite 1-D float64 array, optionally of a given length."""
    arr = np.asarray(b, dtype=float).ravel()
    if length is not None and arr.shape[0] != length:
        raise ShapeMismatchError(f"Expected a vector of length {length}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("Vector has non-finite entries")
    return arr


def numerical_rank(A: np.ndarray, rtol: float | None = None) -> int:
    """Count singular values above ``rtol * sigma_max``."""
    rtol = float(get_env_from_schema("RANK_TOL")) if rtol is None else rtol
    sv = sla.svdvals(np.asarray(A, dtype=float))
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def require_full_column_rank(A: np.ndarray, rtol: float | None = None) -> None:
    """Raise :class:`RankDeficientError` unless *A* has numerical rank ``k``."""
    rank = numerical_rank(A, rtol)
    if rank < A.shape[1]:
        raise RankDeficientError(f"Matrix has numerical rank {rank} < k={A.shape[1]}")


def orthonormal_basis(A: Any, rtol: float | None = None) -> np.ndarray:
    """Orthonormal basis of the column space of *A* via thin QR.

    Column signs are fixed so that R has a nonnegative diagonal; an already
    orthonormal *A* is then returned unchanged (up to rounding).

    Args:
        A: ``d × k`` matrix of full column rank.
        rtol: Rank threshold relative to sigma_max (default ``RANK_TOL``).

    Returns:
        ``d × k`` array U with ``UᵀU = I`` and ``col(U) = col(A)``.

    Raises:
        RankDeficientError: If the numerical rank is below k.
    """
    arr = as_matrix(A)
    require_full_column_rank(arr, rtol)
    q, r = sla.qr(arr, mode="economic")
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs
