"""Induced minimum singular value sigma_min,p(A) = min over ‖x‖_p = 1 of ‖Ax‖_p.

Three methods, chosen by p:

* p = 2: smallest singular value (certified).
* p = 1: exact, one linear program per sign orthant of x (certified).
* p >= 3 or inf: multi-start projected gradient on the ℓp sphere with Armijo
  backtracking. The value is the best point found, an upper estimate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
from scipy import linalg as sla
from scipy import sparse
from scipy.optimize import linprog

from config import get_env_from_schema
from linalg.matrix import as_matrix
from linalg.norms import NormIndex, format_norm_index, lp_norm, normalize_norm_index
from utils import InfeasibleError, SolverFailedError, ValidationError, get_logger

logger = get_logger(__name__)

SigmaMethod = Literal["svd", "orthant_lp", "sphere_search"]
_CERTIFIED_METHODS: frozenset[str] = frozenset({"svd", "orthant_lp"})

_ARMIJO_C = 1e-4
_MIN_STEP = 1e-16
_MAX_DESCENT_ITER = 1000


@dataclass(frozen=True, slots=True)
class SigmaMinP:
    """Minimum of ‖Ax‖_p over the ℓp unit sphere.

    Attributes:
        p: Norm index.
        value: The computed minimum (an upper estimate when not certified).
        method: ``"svd"``, ``"orthant_lp"`` or ``"sphere_search"``.
        certified: True when *value* is exact up to solver precision.
    """

    p: NormIndex
    value: float
    method: SigmaMethod
    certified: bool

    def __post_init__(self) -> None:
        if not self.value >= 0.0:
            raise ValidationError(f"sigma_min,p must be nonnegative, got {self.value}")
        if self.certified and self.method not in _CERTIFIED_METHODS:
            raise ValidationError(f"Method {self.method!r} cannot be certified")

    def to_dict(self) -> dict[str, Any]:
        return {
            "p": format_norm_index(self.p),
            "value": self.value,
            "method": self.method,
            "certified": self.certified,
        }


def sigma_min_p(
    A: Any,
    p: int | float | str,
    *,
    rng: np.random.Generator | None = None,
    restarts: int | None = None,
    tol: float | None = None,
    max_orthant_k: int | None = None,
) -> SigmaMinP:
    """Compute sigma_min,p(A).

    Args:
        A: ``d × k`` nonzero matrix.
        p: Norm index (integer >= 1 or ``"inf"``).
        rng: Generator for the sphere-search starts (default: seeded with 0,
            so the result is a pure function of the inputs).
        restarts: Random starts for the sphere search (default ``SIGMA_RESTARTS``).
        tol: Relative improvement that ends one descent (default ``SIGMA_TOL``).
        max_orthant_k: Largest k accepted by the orthant LPs
            (default ``SIGMA_ORTHANT_MAX_K``).

    Returns:
        A :class:`SigmaMinP`.

    Raises:
        ValidationError: If *A* is the zero matrix or *p* is invalid.
        InfeasibleError: If p = 1 and k exceeds *max_orthant_k*.
        SolverFailedError: If an orthant LP fails.
    """
    arr = as_matrix(A)
    p = normalize_norm_index(p)
    if not np.any(arr):
        raise ValidationError("sigma_min,p is undefined for the zero matrix")

    if p == 2:
        value = float(sla.svdvals(arr)[-1])
        return SigmaMinP(p=2, value=max(value, 0.0), method="svd", certified=True)

    if p == 1:
        max_k = (
            int(get_env_from_schema("SIGMA_ORTHANT_MAX_K")) if max_orthant_k is None
            else max_orthant_k
        )
        value = _orthant_lp(arr, max_k)
        return SigmaMinP(p=1, value=value, method="orthant_lp", certified=True)

    restarts = int(get_env_from_schema("SIGMA_RESTARTS")) if restarts is None else restarts
    tol = float(get_env_from_schema("SIGMA_TOL")) if tol is None else tol
    rng = np.random.default_rng(0) if rng is None else rng
    value = _sphere_search(arr, p, rng, restarts, tol)
    return SigmaMinP(p=p, value=value, method="sphere_search", certified=False)


# ── p = 1 ──


def _orthant_lp(arr: np.ndarray, max_k: int) -> float:
    """Minimum of ‖Ax‖₁ over ‖x‖₁ = 1, one LP per sign pattern with s_0 = +1."""
    d, k = arr.shape
    if k > max_k:
        raise InfeasibleError(
            f"Exact sigma_min,1 needs 2^{k - 1} linear programs; k={k} exceeds the cap {max_k}"
        )

    # Variables [x (k), e (d)]: minimize sum(e) s.t. -e <= Ax <= e.
    a_sp = sparse.csr_matrix(arr)
    eye = sparse.identity(d, format="csr")
    a_ub = sparse.vstack(
        [sparse.hstack([a_sp, -eye]), sparse.hstack([-a_sp, -eye])], format="csr"
    )
    b_ub = np.zeros(2 * d)
    cost = np.concatenate([np.zeros(k), np.ones(d)])
    e_bounds = [(0.0, None)] * d

    best = math.inf
    for tail in itertools.product((1.0, -1.0), repeat=k - 1):
        signs = np.array((1.0, *tail))
        a_eq = np.concatenate([signs, np.zeros(d)])[None, :]
        x_bounds = [(0.0, None) if s > 0 else (None, 0.0) for s in signs]
        res = linprog(
            cost,
            A_ub=a_ub,
            b_ub=b_ub,
            A_eq=a_eq,
            b_eq=np.array([1.0]),
            bounds=x_bounds + e_bounds,
            method="highs",
        )
        if res.status != 0:
            raise SolverFailedError(
                f"Orthant LP failed for signs {signs.tolist()}: {res.message}", status=res.status
            )
        best = min(best, float(res.fun))

    logger.debug("sigma_min,1 over %d orthants: %.6g", 2 ** (k - 1), best)
    return max(best, 0.0)


# ── p >= 3 and inf ──


def _ratio(arr: np.ndarray, x: np.ndarray, p: NormIndex) -> float:
    return lp_norm(arr @ x, p) / lp_norm(x, p)


def _norm_gradient(y: np.ndarray, p: NormIndex) -> np.ndarray:
    """Gradient (a subgradient for p = inf) of ‖y‖_p."""
    if math.isinf(p):
        g = np.zeros_like(y)
        j = int(np.argmax(np.abs(y)))
        g[j] = np.sign(y[j])
        return g
    n = lp_norm(y, p)
    if n == 0.0:
        return np.zeros_like(y)
    return np.sign(y) * (np.abs(y) / n) ** (p - 1)


def _descend(
    arr: np.ndarray,
    x: np.ndarray,
    p: NormIndex,
    tol: float,
    step: float,
) -> float:
    """Projected gradient descent of the ratio from *x*; returns the best ratio."""
    x = x / lp_norm(x, p)
    f = _ratio(arr, x, p)
    for _ in range(_MAX_DESCENT_ITER):
        g = arr.T @ _norm_gradient(arr @ x, p) - f * _norm_gradient(x, p)
        gg = float(g @ g)
        if gg == 0.0:
            break
        t = step
        accepted = False
        while t >= _MIN_STEP:
            cand = x - t * g
            nc = lp_norm(cand, p)
            if nc > 0.0:
                cand = cand / nc
                fc = _ratio(arr, cand, p)
                if fc <= f - _ARMIJO_C * t * gg:
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            break
        improvement = f - fc
        x, f = cand, fc
        step = 2.0 * t
        if improvement <= tol * max(f, np.finfo(float).tiny):
            break
    return f


def _sphere_search(
    arr: np.ndarray,
    p: NormIndex,
    rng: np.random.Generator,
    restarts: int,
    tol: float,
) -> float:
    k = arr.shape[1]
    _, sv, vt = sla.svd(arr, full_matrices=False)
    step = 1.0 / float(sv[0])

    starts = [vt[-1]] + [np.eye(k)[j] for j in range(k)]
    starts += [rng.standard_normal(k) for _ in range(restarts)]

    best = math.inf
    for x0 in starts:
        if not np.any(x0):
            continue
        best = min(best, _descend(arr, x0, p, tol, step))
    logger.debug(
        "sigma_min,%s sphere search (%d starts): %.6g",
        format_norm_index(p),
        len(starts),
        best,
    )
    return best
