"""Exact distances between discrete distributions.

Total variation is computed over the union of supports with exact point
keys. The Prokhorov distance under an ℓp ground metric is computed through
the coupling characterization: ε is feasible iff some coupling puts mass at
most ε on pairs farther apart than ε, which is a max-mass transportation LP
over the admissible pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from config import get_env_from_schema
from distributions.discrete import DiscreteDist, point_key
from distributions.rounding import RoundingParams, round_dist
from linalg import NormIndex, dual_root_k, lp_norm_rows, normalize_norm_index
from utils import ShapeMismatchError, SolverFailedError, TooLargeError, ValidationError, get_logger

logger = get_logger(__name__)

_LP_SLACK = 1e-9


def tv_distance(F: DiscreteDist, G: DiscreteDist) -> float:
    """½ Σ |p_F(x) − p_G(x)| over the union of both supports."""
    if F.k != G.k:
        raise ShapeMismatchError(f"Distributions live in different dimensions ({F.k} vs {G.k})")
    mass: dict[tuple[float, ...], float] = {}
    for point, prob in zip(F.support, F.probs):
        mass[point_key(point)] = float(prob)
    for point, prob in zip(G.support, G.probs):
        key = point_key(point)
        mass[key] = mass.get(key, 0.0) - float(prob)
    return min(1.0, 0.5 * math.fsum(abs(v) for v in mass.values()))


def pairwise_distances(F: DiscreteDist, G: DiscreteDist, p: NormIndex) -> np.ndarray:
    """``|supp F| × |supp G|`` matrix of ℓp distances."""
    if F.k != G.k:
        raise ShapeMismatchError(f"Distributions live in different dimensions ({F.k} vs {G.k})")
    diff = F.support[:, None, :] - G.support[None, :, :]
    return lp_norm_rows(diff.reshape(-1, F.k), p).reshape(F.size, G.size)


def _canonical_order(F: DiscreteDist, G: DiscreteDist) -> tuple[DiscreteDist, DiscreteDist]:
    def key(D: DiscreteDist) -> tuple[int, bytes, bytes]:
        return (D.size, D.support.tobytes(), D.probs.tobytes())

    return (G, F) if key(F) > key(G) else (F, G)


def _admissible_mass(cost: np.ndarray, pF: np.ndarray, pG: np.ndarray, radius: float) -> float:
    """Largest sub-coupling mass carried by pairs at distance ≤ radius."""
    rows, cols = np.nonzero(cost <= radius)
    if rows.size == 0:
        return 0.0
    m, n = cost.shape
    nvar = rows.size
    var_idx = np.arange(nvar)
    a_rows = sparse.csr_matrix((np.ones(nvar), (rows, var_idx)), shape=(m, nvar))
    a_cols = sparse.csr_matrix((np.ones(nvar), (cols, var_idx)), shape=(n, nvar))
    a_ub = sparse.vstack([a_rows, a_cols], format="csr")
    b_ub = np.concatenate([pF, pG])
    res = linprog(-np.ones(nvar), A_ub=a_ub, b_ub=b_ub, bounds=(0.0, None), method="highs")
    if res.status != 0:
        raise SolverFailedError(f"Admissible-mass LP failed: {res.message}", status=res.status)
    return min(1.0, float(-res.fun))


def prokhorov_distance(
    F: DiscreteDist,
    G: DiscreteDist,
    p: int | float | str = 2,
    tol: float | None = None,
) -> float:
    """Prokhorov distance π_p(F, G) between two discrete distributions.

    The admissible mass M(c) is a step function of the radius that only
    changes at pairwise distances, so the search runs over the sorted
    distinct distances c_1 < ... < c_r. With j* the first index where
    c_j ≥ 1 − M(c_j), the distance is ``min(c_{j*}, 1 − M(c_{j*-1}), 1)``.

    Args:
        F: First distribution.
        G: Second distribution.
        p: Ground-metric norm index.
        tol: Feasibility slack; defaults to PROKHOROV_TOL. The LP is solved
            to machine accuracy so the result is exact up to this slack.

    Returns:
        π_p(F, G) in [0, 1]. The result does not depend on argument order.

    Raises:
        TooLargeError: If ``|supp F| · |supp G|`` exceeds PROKHOROV_MAX_PAIRS.
    """
    p = normalize_norm_index(p)
    tol = float(get_env_from_schema("PROKHOROV_TOL") if tol is None else tol)
    if tol < 0.0:
        raise ValidationError(f"tol must be nonnegative, got {tol}")
    cap = int(get_env_from_schema("PROKHOROV_MAX_PAIRS"))
    if F.size * G.size > cap:
        raise TooLargeError(
            f"Prokhorov LP needs {F.size * G.size} pairs, cap is {cap} (PROKHOROV_MAX_PAIRS)"
        )
    F, G = _canonical_order(F, G)
    cost = pairwise_distances(F, G, p)
    radii = np.unique(cost)
    slack = min(tol, _LP_SLACK)

    masses: dict[int, float] = {}

    def mass_at(j: int) -> float:
        if j < 0:
            return 0.0
        if j not in masses:
            masses[j] = _admissible_mass(cost, F.probs, G.probs, float(radii[j]))
        return masses[j]

    def feasible(j: int) -> bool:
        return float(radii[j]) + slack >= 1.0 - mass_at(j)

    lo, hi = 0, radii.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(mid):
            hi = mid
        else:
            lo = mid + 1
    j_star = lo
    result = min(float(radii[j_star]), 1.0 - mass_at(j_star - 1), 1.0)
    result = max(0.0, result)
    logger.debug(
        "Prokhorov distance %.6g (p=%s, %d radii, %d LPs)", result, p, radii.size, len(masses)
    )
    return result


def coupling_violation(
    coupling: np.ndarray,
    F: DiscreteDist,
    G: DiscreteDist,
    eps: float,
    p: int | float | str = 2,
    atol: float = 1e-9,
) -> float:
    """Mass an explicit coupling of (F, G) puts on pairs farther apart than eps.

    A value ≤ eps certifies π_p(F, G) ≤ eps.

    Raises:
        ShapeMismatchError: If the coupling is not ``|supp F| × |supp G|``.
        ValidationError: If its marginals differ from F and G by more than atol.
    """
    gamma = np.asarray(coupling, dtype=float)
    if gamma.shape != (F.size, G.size):
        raise ShapeMismatchError(f"Coupling has shape {gamma.shape}, expected {(F.size, G.size)}")
    if np.any(gamma < -atol):
        raise ValidationError("Coupling has negative entries")
    if np.max(np.abs(gamma.sum(axis=1) - F.probs)) > atol:
        raise ValidationError("Coupling row marginal differs from F")
    if np.max(np.abs(gamma.sum(axis=0) - G.probs)) > atol:
        raise ValidationError("Coupling column marginal differs from G")
    far = pairwise_distances(F, G, normalize_norm_index(p)) > eps
    return float(gamma[far].sum())


def support_distance_mass(
    F: DiscreteDist, G: DiscreteDist, eps: float, p: int | float | str = 2
) -> float:
    """Mass of x ~ F whose ℓp distance to supp(G) exceeds eps."""
    nearest = pairwise_distances(F, G, normalize_norm_index(p)).min(axis=1)
    return float(F.probs[nearest > eps].sum())


def tv_rounding_bound(eps: float, delta: float, k: int, p: int | float | str) -> float:
    """Upper bound (1 + k^{1-1/p}/δ)·ε on the expected TV of rounded distributions."""
    if delta <= 0.0:
        raise ValidationError(f"delta must be positive, got {delta}")
    return (1.0 + dual_root_k(k, normalize_norm_index(p)) / delta) * eps


@dataclass(frozen=True)
class RoundedTvEstimate:
    mean: float
    stderr: float
    draws: int


def expected_rounded_tv(
    F: DiscreteDist,
    G: DiscreteDist,
    delta: float,
    draws: int,
    rng: np.random.Generator,
) -> RoundedTvEstimate:
    """Monte-Carlo mean of tv(⌊F⌋, ⌊G⌋) over grid offsets ell ~ U[0, δ]^k."""
    if draws < 1:
        raise ValidationError(f"draws must be positive, got {draws}")
    values = np.empty(draws)
    for t in range(draws):
        rp = RoundingParams(ell=rng.uniform(0.0, delta, size=F.k), delta=delta)
        values[t] = tv_distance(round_dist(F, rp), round_dist(G, rp))
    stderr = float(values.std(ddof=1) / math.sqrt(draws)) if draws > 1 else 0.0
    return RoundedTvEstimate(mean=float(values.mean()), stderr=stderr, draws=draws)
