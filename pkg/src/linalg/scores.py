"""Row-sampling importance scores: leverage scores (p = 2) and Lewis weights.

Lewis weights are the fixed point of

    w_i = ( a_iᵀ (Aᵀ W^{1-2/p} A)^{-1} a_i )^{p/2},

computed by iterating the right-hand side from the leverage scores. For
p >= 4 the plain iteration need not contract, so each step is damped
geometrically with exponent 1/(p-1) and weights are clipped to [1e-12, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy import linalg as sla

from config import get_env_from_schema
from linalg.matrix import as_matrix, orthonormal_basis, require_full_column_rank
from linalg.norms import NormIndex, format_norm_index, normalize_norm_index
from utils import NoConvergenceError, ValidationError, get_logger

logger = get_logger(__name__)

_WEIGHT_FLOOR = 1e-12
_WEIGHT_CEIL = 1.0
_LEWIS_INFLATION = 2


@dataclass(frozen=True)
class ScoreVector:
    """Importance scores of the rows of A.

    Attributes:
        p: Norm index the scores were computed for.
        scores: One nonnegative score per row; they sum to k.
        residual: Max-norm fixed-point residual at *scores* (0 for leverage).
        iterations: Fixed-point iterations performed (0 for leverage).
        converged: False when the iteration cap was reached first.
    """

    p: NormIndex
    scores: np.ndarray
    residual: float = 0.0
    iterations: int = 0
    converged: bool = True

    @property
    def total(self) -> float:
        return float(np.sum(self.scores))

    @property
    def probabilities(self) -> np.ndarray:
        """Scores normalized to a probability vector."""
        return self.scores / np.sum(self.scores)

    def to_dict(self) -> dict[str, Any]:
        return {
            "p": format_norm_index(self.p),
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "scores": self.scores.tolist(),
        }


def leverage_scores(A: Any) -> ScoreVector:
    """Squared row norms of an orthonormal basis of col(A).

    Raises:
        RankDeficientError: If A is not of full column rank.
    """
    u = orthonormal_basis(A)
    scores = np.einsum("ij,ij->i", u, u)
    return ScoreVector(p=2, scores=scores)


def _lewis_map(arr: np.ndarray, w: np.ndarray, p: int) -> np.ndarray:
    """One application of the Lewis fixed-point map at weights *w*."""
    # tau_i = a_iᵀ (Aᵀ W^{1-2/p} A)^{-1} a_i = lev_i(W^{1/2-1/p} A) / w_i^{1-2/p}
    scale = w ** (0.5 - 1.0 / p)
    q, _ = sla.qr(arr * scale[:, None], mode="economic")
    lev = np.einsum("ij,ij->i", q, q)
    tau = lev / w ** (1.0 - 2.0 / p)
    return tau ** (p / 2.0)


def lewis_weights(
    A: Any,
    p: int | float | str,
    tol: float | None = None,
    max_iter: int | None = None,
) -> ScoreVector:
    """Lewis weights of A for an integer p >= 1.

    The returned ``residual`` is ``max |T(w) - w|`` evaluated at the returned
    weights, where T is the fixed-point map above.

    Args:
        A: ``d × k`` matrix of full column rank.
        p: Integer norm index; p = 2 returns the leverage scores.
        tol: Residual target (default ``LEWIS_TOL``).
        max_iter: Iteration cap (default ``LEWIS_MAX_ITER``).

    Returns:
        A :class:`ScoreVector`.

    Raises:
        ValidationError: If p is inf.
        RankDeficientError: If A is not of full column rank.
        NoConvergenceError: If the cap is reached; ``partial`` holds the last
            :class:`ScoreVector` (``converged=False``), usable for sampling.
    """
    p = normalize_norm_index(p)
    if math.isinf(p):
        raise ValidationError("Lewis weights are defined here for finite p only")
    if p == 2:
        return leverage_scores(A)

    arr = as_matrix(A)
    require_full_column_rank(arr)
    tol = float(get_env_from_schema("LEWIS_TOL")) if tol is None else tol
    max_iter = int(get_env_from_schema("LEWIS_MAX_ITER")) if max_iter is None else max_iter
    damp = 1.0 / (p - 1) if p >= 4 else 1.0

    w = np.clip(leverage_scores(arr).scores, _WEIGHT_FLOOR, None)
    residual = math.inf
    for it in range(max_iter + 1):
        tw = _lewis_map(arr, w, p)
        residual = float(np.max(np.abs(tw - w)))
        if residual <= tol:
            logger.debug("Lewis weights p=%d converged in %d iterations", p, it)
            return ScoreVector(p=p, scores=w, residual=residual, iterations=it)
        if it == max_iter:
            break
        if damp < 1.0:
            w = np.clip(w ** (1.0 - damp) * tw**damp, _WEIGHT_FLOOR, _WEIGHT_CEIL)
        else:
            w = np.clip(tw, _WEIGHT_FLOOR, None)

    partial = ScoreVector(p=p, scores=w, residual=residual, iterations=max_iter, converged=False)
    raise NoConvergenceError(
        f"Lewis weights p={p} did not reach tol={tol:g} in {max_iter} iterations "
        f"(residual {residual:.3g})",
        residual=residual,
        partial=partial,
    )


def sampling_probabilities(A: Any, p: int | float | str) -> tuple[ScoreVector, int]:
    """Scores used to sample rows for ℓp regression, and the sample-count inflation.

    Leverage scores for p = 2, Lewis weights otherwise. When the Lewis
    iteration does not converge the approximate weights are still used and
    the inflation factor is 2.

    Returns:
        ``(scores, inflation)`` with inflation 1 or 2.
    """
    p = normalize_norm_index(p)
    if p == 2:
        return leverage_scores(A), 1
    try:
        return lewis_weights(A, p), 1
    except NoConvergenceError as exc:
        logger.warning("%s; sampling with approximate weights and 2x samples", exc)
        return exc.partial, _LEWIS_INFLATION
