"""Exact ℓp regression solvers: min over z of ‖Az - b‖_p."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy import linalg as sla
from scipy import sparse
from scipy.optimize import linprog

from config import get_env_from_schema
from linalg import NormIndex, as_vector, format_norm_index, lp_norm, normalize_norm_index
from linalg.matrix import require_full_column_rank
from utils import ShapeMismatchError, SolverFailedError, ValidationError, get_logger

logger = get_logger(__name__)

_DAMPING = 0.5
_MAX_HALVINGS = 30
_STATIONARITY_TOL = 1e-6


@dataclass
class RegressionSolution:
    """Result of an ℓp regression solve.

    Attributes:
        z: Minimizer estimate (k-vector).
        loss: ‖Az - b‖_p on the operands the solver was given.
        iterations: Iterations performed (1 for direct methods).
        converged: False when an iterative method stopped at its cap or
            stalled away from a stationary point.
        p: Norm index.
        method: ``"qr"``, ``"lp"`` or ``"irls"``.
    """

    z: np.ndarray
    loss: float
    iterations: int
    converged: bool
    p: NormIndex
    method: str = ""
    stationarity: float | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "z": self.z.tolist(),
            "loss": self.loss,
            "iterations": self.iterations,
            "converged": self.converged,
            "p": format_norm_index(self.p),
            "method": self.method,
            "stationarity": self.stationarity,
        }


def _operands(A: Any, b: Any) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(A, dtype=float)
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise ShapeMismatchError(f"Expected a 2-D design matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("Design matrix has non-finite entries")
    return arr, as_vector(b, arr.shape[0])


def _no_worse_than_zero(
    arr: np.ndarray, b: np.ndarray, z: np.ndarray, loss: float, p: NormIndex
) -> tuple[np.ndarray, float]:
    """Return the zero vector instead of *z* if it fits b at least as well."""
    zero_loss = lp_norm(b, p)
    if zero_loss <= loss:
        return np.zeros(arr.shape[1]), zero_loss
    return z, loss


def stationarity_residual(A: Any, b: Any, z: Any, p: int) -> float:
    """Scaled gradient norm of ‖Az - b‖_p^p at z, in [0, 1]; 0 at a minimizer.

    The gradient ``Aᵀ(|r|^{p-1} sign r)`` is divided by ``‖A‖_F ‖|r|^{p-1}‖_2``.
    """
    arr, vec = _operands(A, b)
    r = arr @ np.asarray(z, dtype=float) - vec
    psi = np.sign(r) * np.abs(r) ** (p - 1)
    scale = float(np.linalg.norm(arr) * np.linalg.norm(psi))
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(arr.T @ psi) / scale)


def solve_l2(A: Any, b: Any) -> RegressionSolution:
    """Least squares via thin QR.

    Raises:
        RankDeficientError: If A does not have full column rank.
    """
    arr, vec = _operands(A, b)
    require_full_column_rank(arr)
    q, r = sla.qr(arr, mode="economic")
    z = sla.solve_triangular(r, q.T @ vec)
    loss = lp_norm(arr @ z - vec, 2)
    z, loss = _no_worse_than_zero(arr, vec, z, loss, 2)
    return RegressionSolution(z=z, loss=loss, iterations=1, converged=True, p=2, method="qr")


def solve_l1(A: Any, b: Any) -> RegressionSolution:
    """Least absolute deviations as the LP min Σe s.t. -e <= Az - b <= e.

    Raises:
        SolverFailedError: If the LP does not finish with status 0.
    """
    arr, vec = _operands(A, b)
    d, k = arr.shape
    a_sp = sparse.csr_matrix(arr)
    eye = sparse.identity(d, format="csr")
    a_ub = sparse.vstack(
        [sparse.hstack([a_sp, -eye]), sparse.hstack([-a_sp, -eye])], format="csr"
    )
    b_ub = np.concatenate([vec, -vec])
    cost = np.concatenate([np.zeros(k), np.ones(d)])
    bounds = [(None, None)] * k + [(0.0, None)] * d
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        raise SolverFailedError(f"ℓ1 regression LP failed: {res.message}", status=res.status)
    z = np.asarray(res.x[:k], dtype=float)
    loss = lp_norm(arr @ z - vec, 1)
    z, loss = _no_worse_than_zero(arr, vec, z, loss, 1)
    return RegressionSolution(
        z=z,
        loss=loss,
        iterations=int(getattr(res, "nit", 1) or 1),
        converged=True,
        p=1,
        method="lp",
    )


def solve_lp(
    A: Any,
    b: Any,
    p: int,
    tol: float | None = None,
    max_iter: int | None = None,
    smoothing: float | None = None,
) -> RegressionSolution:
    """ℓp regression for integer p >= 3 by iteratively reweighted least squares.

    Starts from the least-squares solution. Each iteration solves the weighted
    problem with weights ``(|r_i| + smoothing)^{p-2}``; when the full step does
    not decrease the loss it is halved until it does. Converged when the
    relative loss change drops below *tol*. When no halved step decreases the
    loss, the iterate counts as converged only if its
    :func:`stationarity_residual` is at most 1e-6. Hitting the cap is not an
    error: the best iterate is returned with ``converged=False``.

    Raises:
        ValidationError: If p is not an integer >= 3.
        RankDeficientError: If A does not have full column rank.
    """
    p = normalize_norm_index(p)
    if math.isinf(p) or p < 3:
        raise ValidationError(f"solve_lp needs an integer p >= 3, got {p}")
    arr, vec = _operands(A, b)
    tol = float(get_env_from_schema("IRLS_TOL")) if tol is None else tol
    max_iter = int(get_env_from_schema("IRLS_MAX_ITER")) if max_iter is None else max_iter
    smoothing = float(get_env_from_schema("IRLS_SMOOTHING")) if smoothing is None else smoothing

    z = solve_l2(arr, vec).z
    loss = lp_norm(arr @ z - vec, p)
    converged = loss == 0.0
    iterations = 0
    while not converged and iterations < max_iter:
        iterations += 1
        r = arr @ z - vec
        sw = np.sqrt((np.abs(r) + smoothing) ** (p - 2))
        target = sla.lstsq(arr * sw[:, None], vec * sw)[0]
        direction = target - z
        step = 1.0
        new_loss = loss
        for _ in range(_MAX_HALVINGS):
            cand = z + step * direction
            new_loss = lp_norm(arr @ cand - vec, p)
            if new_loss < loss:
                break
            step *= _DAMPING
        if new_loss >= loss:
            converged = stationarity_residual(arr, vec, z, p) <= _STATIONARITY_TOL
            break
        change = (loss - new_loss) / loss
        z, loss = cand, new_loss
        converged = change < tol or loss == 0.0

    if not converged:
        logger.warning("IRLS p=%d stopped after %d iterations (loss %.6g)", p, iterations, loss)
    z, loss = _no_worse_than_zero(arr, vec, z, loss, p)
    return RegressionSolution(
        z=z,
        loss=loss,
        iterations=max(iterations, 1),
        converged=converged,
        p=p,
        method="irls",
        stationarity=stationarity_residual(arr, vec, z, p),
    )


def solve_regression(A: Any, b: Any, p: int | float | str) -> RegressionSolution:
    """Dispatch to :func:`solve_l1`, :func:`solve_l2` or :func:`solve_lp`.

    Raises:
        ValidationError: If p is inf.
    """
    p = normalize_norm_index(p)
    if p == 1:
        return solve_l1(A, b)
    if p == 2:
        return solve_l2(A, b)
    if math.isinf(p):
        raise ValidationError("ℓ∞ regression is not supported")
    return solve_lp(A, b, p)
