"""Assembly of the robust mechanism from a base mechanism and the model prior."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from distributions import DiscreteDist, DistributionOracle, RoundingParams
from linalg import NormIndex, format_norm_index, normalize_norm_index
from mechanisms.bounds import eta_mu_bounds, revenue_deficit_bound
from mechanisms.outcomes import Lottery, Mechanism, Realization
from mechanisms.stages import RoundDownMechanism, RoundUpMechanism, TVRobustMechanism
from utils import PreconditionFailedError, ValidationError, get_logger

logger = get_logger(__name__)


def _as_oracles(
    priors: Sequence[DiscreteDist | DistributionOracle],
) -> tuple[DistributionOracle, ...]:
    return tuple(
        D if isinstance(D, DistributionOracle) else DistributionOracle(D, name=f"prior[{i}]")
        for i, D in enumerate(priors)
    )


def build_m1(
    mhat: Mechanism,
    samplers: Sequence[DiscreteDist | DistributionOracle],
    rp: RoundingParams,
    lipschitz: float,
    a_inf: float,
    k: int,
) -> RoundDownMechanism:
    """Round-down stage; ``lipschitz`` is the type-space constant L."""
    return RoundDownMechanism(mhat, _as_oracles(samplers), rp, k * a_inf * lipschitz)


def build_m2(
    m1: Mechanism,
    dhat: Sequence[DiscreteDist | DistributionOracle],
    zeta: float,
    rp: RoundingParams,
    p: int | float | str,
    lipschitz: float,
    a_inf: float,
    k: int,
) -> TVRobustMechanism:
    return TVRobustMechanism(
        m1, _as_oracles(dhat), zeta, rp, normalize_norm_index(p), k * a_inf * lipschitz
    )


def build_m_ell(
    m2: Mechanism, rp: RoundingParams, lipschitz: float, a_inf: float, k: int
) -> RoundUpMechanism:
    return RoundUpMechanism(m2, rp, k * a_inf * lipschitz)


class RobustMechanism(Mechanism):
    """The composed mechanism round-up ∘ tv-robust ∘ round-down ∘ base.

    Owns the sampled grid offset and the seed of its auction stream, so
    ``run_auction`` is deterministic. Never receives the true prior.
    """

    name = "robust"

    def __init__(
        self,
        m1: RoundDownMechanism,
        m2: TVRobustMechanism,
        m_ell: RoundUpMechanism,
        *,
        zeta: float,
        p: NormIndex,
        lipschitz: float,
        a_inf: float,
        auction_seed: int,
    ) -> None:
        super().__init__(m_ell.n)
        self.m1, self.m2, self.m_ell = m1, m2, m_ell
        self.rp = m1.rp
        self.zeta = zeta
        self.p = p
        self.lipschitz = lipschitz
        self.a_inf = a_inf
        self.auction_seed = auction_seed

    @property
    def stages(self) -> tuple[Mechanism, Mechanism, Mechanism]:
        return (self.m1, self.m2, self.m_ell)

    @property
    def inner(self) -> Mechanism:
        return self.m_ell.inner

    @property
    def depth(self) -> int:
        return self.m_ell.depth

    @property
    def delta(self) -> float:
        return self.rp.delta

    @property
    def ell(self) -> np.ndarray:
        return self.rp.ell

    @property
    def k(self) -> int:
        return self.rp.k

    def lottery(self, reports: Sequence[Any]) -> Lottery:
        return self.m_ell.lottery(reports)

    def run(self, reports: Sequence[Any], rng: np.random.Generator) -> Realization:
        return self.m_ell.run(reports, rng)

    def predicted_bounds(self, rho: float | None = None) -> tuple[float, float]:
        """(η, μ) from :func:`eta_mu_bounds` for this mechanism's parameters."""
        return eta_mu_bounds(
            self.zeta, self.delta, self.k, self.p, self.n, self.lipschitz, self.a_inf, rho
        )

    def revenue_bound(self, rho: float | None = None) -> float:
        return revenue_deficit_bound(
            self.zeta, self.delta, self.k, self.p, self.n, self.lipschitz, self.a_inf, rho
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "k": self.k,
            "p": format_norm_index(self.p),
            "zeta": self.zeta,
            "rounding": self.rp.to_dict(),
            "lipschitz": self.lipschitz,
            "a_inf": self.a_inf,
            "auction_seed": self.auction_seed,
        }


def build_robust(
    mhat: Mechanism,
    dhat: Sequence[DiscreteDist | DistributionOracle],
    zeta: float,
    p: int | float | str,
    lipschitz: float,
    a_inf: float,
    k: int,
    n: int,
    rng: np.random.Generator,
    *,
    eps_mdl: float = 0.0,
    delta: float | None = None,
) -> RobustMechanism:
    """Sample the grid offset and compose the three stages on top of mhat.

    The grid width is √ζ unless ``delta`` overrides it; the offset is drawn
    from U[0, δ]^k.

    Raises:
        PreconditionFailedError: If ζ < eps_mdl or the grid width would be 0.
    """
    p = normalize_norm_index(p)
    if mhat.n != n or len(dhat) != n:
        raise ValidationError(f"Expected {n} bidders, got mechanism n={mhat.n}, {len(dhat)} priors")
    if zeta < eps_mdl:
        raise PreconditionFailedError(f"zeta={zeta} is below the model error eps_mdl={eps_mdl}")
    width = math.sqrt(zeta) if delta is None else float(delta)
    if not width > 0.0:
        raise PreconditionFailedError("Grid width is 0; set a positive delta override when zeta=0")
    rp = RoundingParams(ell=rng.uniform(0.0, width, size=k), delta=width)
    auction_seed = int(rng.integers(0, 2**63 - 1))
    oracles = _as_oracles(dhat)
    m1 = build_m1(mhat, oracles, rp, lipschitz, a_inf, k)
    m2 = build_m2(m1, oracles, zeta, rp, p, lipschitz, a_inf, k)
    m_ell = build_m_ell(m2, rp, lipschitz, a_inf, k)
    logger.info(
        "Robust mechanism built: n=%d k=%d p=%s zeta=%.6g delta=%.6g", n, k, p, zeta, width
    )
    return RobustMechanism(
        m1,
        m2,
        m_ell,
        zeta=float(zeta),
        p=p,
        lipschitz=float(lipschitz),
        a_inf=float(a_inf),
        auction_seed=auction_seed,
    )


@dataclass(frozen=True)
class AuctionOutcome:
    bundles: tuple[int, ...]
    payments: tuple[float, ...]
    excluded: tuple[bool, ...]

    @property
    def revenue(self) -> float:
        return float(sum(self.payments))

    def to_dict(self) -> dict[str, Any]:
        return {
            "allocations": list(self.bundles),
            "payments": list(self.payments),
            "excluded": list(self.excluded),
        }


def run_auction(rm: RobustMechanism, latent_reports: Sequence[Any]) -> AuctionOutcome:
    """Execute the composed mechanism once on the recovered latent reports.

    Raises:
        ValidationError: If a report has non-finite entries.
    """
    reports = [np.asarray(z, dtype=float).ravel() for z in latent_reports]
    for i, z in enumerate(reports):
        if not np.all(np.isfinite(z)):
            raise ValidationError(f"Report of bidder {i} is not finite")
    r = rm.run(reports, np.random.default_rng(rm.auction_seed))
    return AuctionOutcome(bundles=r.bundles, payments=r.payments, excluded=r.excluded)
