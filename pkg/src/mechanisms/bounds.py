"""Explicit BIC-slack, failure-mass and revenue-loss bounds of the robust pipeline.

All sums carry their constants; for p = inf, k^{1/p} is 1 and
k^{(1+p)/p} is k.
"""

from __future__ import annotations

import math
from typing import Sequence

from distributions import DiscreteDist, RoundingParams, round_dist, tv_distance
from linalg import NormIndex, dual_root_k, normalize_norm_index, root_k
from utils import ShapeMismatchError, ValidationError


def _check_nonnegative(**params: float) -> None:
    for name, value in params.items():
        if value < 0.0 or math.isnan(value):
            raise ValidationError(f"{name} must be nonnegative, got {value}")


def _root_k_plus_one(k: int, p: NormIndex) -> float:
    """k^{(1+p)/p}."""
    return float(k) * root_k(k, p)


def tv_rho_upper(n: int, k: int, p: int | float | str, delta: float, zeta: float) -> float:
    """n(1 + k^{1-1/p}/δ)ζ, the expected-TV bound used when the true prior is unknown."""
    _check_nonnegative(zeta=zeta)
    if delta <= 0.0:
        raise ValidationError(f"delta must be positive, got {delta}")
    return n * (1.0 + dual_root_k(k, normalize_norm_index(p)) / delta) * zeta


def exact_rho(
    dhat: Sequence[DiscreteDist], f_true: Sequence[DiscreteDist], rp: RoundingParams
) -> float:
    """Σ_i tv(⌊F̂_i⌋, ⌊F_i⌋) for the sampled grid."""
    if len(dhat) != len(f_true):
        raise ShapeMismatchError(f"{len(dhat)} model priors but {len(f_true)} true priors")
    return math.fsum(
        tv_distance(round_dist(Fh, rp), round_dist(F, rp)) for Fh, F in zip(dhat, f_true)
    )


def eta_mu_bounds(
    zeta: float,
    delta: float,
    k: int,
    p: int | float | str,
    n: int,
    lipschitz: float,
    a_inf: float,
    rho: float | None = None,
) -> tuple[float, float]:
    """Explicit (η, μ) of the robust mechanism.

    η = 2kALδ + 4kLAρ + 3k(ζ + δk^{1/p})AL + 2δk^{(1+p)/p}AL + 3kLAδ and
    μ = ζ + δk^{1/p}, with A = ‖A‖_∞ and L the type-space Lipschitz constant.
    When rho is None it is replaced by :func:`tv_rho_upper`.
    """
    p = normalize_norm_index(p)
    _check_nonnegative(zeta=zeta, delta=delta, lipschitz=lipschitz, a_inf=a_inf)
    if rho is None:
        rho = tv_rho_upper(n, k, p, delta, zeta) if delta > 0.0 else 0.0
    _check_nonnegative(rho=rho)
    AL = a_inf * lipschitz
    radius = zeta + delta * root_k(k, p)
    eta = (
        2.0 * k * AL * delta
        + 4.0 * k * AL * rho
        + 3.0 * k * radius * AL
        + 2.0 * delta * _root_k_plus_one(k, p) * AL
        + 3.0 * k * AL * delta
    )
    return eta, radius


def revenue_deficit_bound(
    zeta: float,
    delta: float,
    k: int,
    p: int | float | str,
    n: int,
    lipschitz: float,
    a_inf: float,
    rho: float | None = None,
) -> float:
    """Explicit revenue the robust mechanism may lose against the base mechanism.

    nkALδ + nkLAρ + nk(ζ + δk^{1/p})AL + nkLAδ + 2nδk^{(1+p)/p}AL.
    """
    p = normalize_norm_index(p)
    _check_nonnegative(zeta=zeta, delta=delta, lipschitz=lipschitz, a_inf=a_inf)
    if rho is None:
        rho = tv_rho_upper(n, k, p, delta, zeta) if delta > 0.0 else 0.0
    _check_nonnegative(rho=rho)
    AL = a_inf * lipschitz
    radius = zeta + delta * root_k(k, p)
    return (
        n * k * AL * delta
        + n * k * AL * rho
        + n * k * radius * AL
        + n * k * AL * delta
        + 2.0 * n * delta * _root_k_plus_one(k, p) * AL
    )
