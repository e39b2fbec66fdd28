"""Row sampling and rescaling plans for sketched regression.

A plan draws s row indices i.i.d. from a probability vector q and scales the
sampled row j_t by ``(s * q_{j_t})^{-1/p}``, so that ``‖S A x‖_p^p`` is an
unbiased estimate of ``‖A x‖_p^p``.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from linalg.norms import NormIndex, format_norm_index, normalize_norm_index
from utils import BadProbabilitiesError, ShapeMismatchError, ValidationError

_SUM_TOLERANCE = 1e-6


def probability_hash(q: np.ndarray) -> str:
    """SHA-256 of the little-endian float64 bytes of *q*."""
    return hashlib.sha256(np.ascontiguousarray(q, dtype="<f8").tobytes()).hexdigest()


@dataclass(frozen=True)
class SamplePlan:
    """Sampled row indices with their rescaling factors.

    Attributes:
        p: Norm index the rescaling targets.
        d: Number of rows of the operands the plan applies to.
        indices: s row indices in ``[0, d)``, with repetition.
        rescale: s positive factors, ``(s * q[indices])^{-1/p}``.
        q_hash: Hash of the probability vector the indices were drawn from.
        seed: Seed of the generator that drew the indices, when known.
        q: The probability vector itself (absent for plans loaded from JSON).
    """

    p: NormIndex
    d: int
    indices: np.ndarray
    rescale: np.ndarray
    q_hash: str
    seed: int | None = None
    q: np.ndarray | None = None

    @property
    def s(self) -> int:
        return int(self.indices.shape[0])

    @property
    def distinct(self) -> np.ndarray:
        """Sorted distinct row indices."""
        return np.unique(self.indices)

    def to_dict(self) -> dict[str, Any]:
        return {
            "p": format_norm_index(self.p),
            "d": self.d,
            "s": self.s,
            "seed": self.seed,
            "q_hash": self.q_hash,
            "indices": self.indices.tolist(),
            "rescale": self.rescale.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SamplePlan:
        indices = np.asarray(data["indices"], dtype=np.int64)
        rescale = np.asarray(data["rescale"], dtype=float)
        d = int(data["d"])
        if indices.shape != rescale.shape or np.any(indices < 0) or np.any(indices >= d):
            raise ValidationError("Plan indices and rescale factors are inconsistent")
        return cls(
            p=normalize_norm_index(data["p"]),
            d=d,
            indices=indices,
            rescale=rescale,
            q_hash=str(data["q_hash"]),
            seed=data.get("seed"),
        )


def _validate_probabilities(q: Any) -> np.ndarray:
    arr = np.asarray(q, dtype=float).ravel()
    if arr.size == 0 or not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise BadProbabilitiesError("Sampling probabilities must be finite and strictly positive")
    total = float(arr.sum())
    if abs(total - 1.0) > _SUM_TOLERANCE:
        raise BadProbabilitiesError(f"Sampling probabilities sum to {total}, expected 1")
    return arr / total


def build_sample_plan(
    q: Any,
    s: int,
    p: int | float | str,
    rng: np.random.Generator,
    seed: int | None = None,
) -> SamplePlan:
    """Draw s indices i.i.d. from q and compute the rescaling factors.

    Args:
        q: Probability vector over the d rows.
        s: Number of draws (with replacement).
        p: Norm index of the rescaling.
        rng: Generator owned by the caller.
        seed: Seed recorded in the plan for reproducibility.

    Raises:
        BadProbabilitiesError: If any q_i <= 0 or the sum is off by more than 1e-6.
        ValidationError: If s < 1.
    """
    qn = _validate_probabilities(q)
    p = normalize_norm_index(p)
    if int(s) < 1:
        raise ValidationError(f"Sample count must be >= 1, got {s}")
    s = int(s)
    indices = rng.choice(qn.shape[0], size=s, replace=True, p=qn).astype(np.int64)
    exponent = 0.0 if math.isinf(p) else -1.0 / p
    rescale = (s * qn[indices]) ** exponent
    return SamplePlan(
        p=p,
        d=int(qn.shape[0]),
        indices=indices,
        rescale=rescale,
        q_hash=probability_hash(qn),
        seed=seed,
        q=qn,
    )


def full_plan(d: int, p: int | float | str) -> SamplePlan:
    """Identity plan: every row once, in order, with unit rescaling."""
    q = np.full(d, 1.0 / d)
    return SamplePlan(
        p=normalize_norm_index(p),
        d=int(d),
        indices=np.arange(d, dtype=np.int64),
        rescale=np.ones(d),
        q_hash=probability_hash(q),
        q=q,
    )


def apply_plan(plan: SamplePlan, M: Any) -> np.ndarray:
    """Sample and rescale the rows of a matrix, or the entries of a vector.

    Row t of the result is ``rescale[t] * M[indices[t]]``.

    Raises:
        ShapeMismatchError: If M does not have ``plan.d`` rows.
    """
    arr = np.asarray(M, dtype=float)
    if arr.ndim not in (1, 2) or arr.shape[0] != plan.d:
        raise ShapeMismatchError(f"Plan expects {plan.d} rows, operand has shape {arr.shape}")
    rows = arr[plan.indices]
    if arr.ndim == 1:
        return plan.rescale * rows
    return plan.rescale[:, None] * rows
