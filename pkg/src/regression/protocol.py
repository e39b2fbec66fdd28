"""The latent-type query protocol.

A bidder's type is a d-vector t close to the span of the archetypes,
``‖t - A z‖_p <= eps_mdl``, observed entry by entry with noise of ℓp norm at
most ``eps_nq``. The protocol queries a number of entries that depends on k,
n and the failure probability but not on d, and returns ẑ with

    ‖z - ẑ‖_p <= c_p (eps_mdl + eps_nq) / sigma_min,p(A)

with probability at least 1 - delta/n per bidder.
"""

from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np
from scipy import linalg as sla

from config import get_env_from_schema
from config.constants import (
    ERROR_CONSTANT_BASE,
    ERROR_CONSTANT_L1,
    ERROR_CONSTANT_L2,
    ERROR_CONSTANT_SCALE,
    ERROR_CONSTANT_SHIFT,
)
from linalg import (
    ArchetypeMatrix,
    NormIndex,
    SamplePlan,
    SigmaMinP,
    apply_plan,
    as_vector,
    format_norm_index,
    full_plan,
    lp_norm,
    normalize_norm_index,
)
from regression.sketched import boosted_solve, sketched_solve
from utils import (
    InfeasibleError,
    RankDeficientError,
    ShapeMismatchError,
    SingularDesignError,
    ValidationError,
    derive_rng,
    get_logger,
)

logger = get_logger(__name__)

# Exact recovery (zeta = 0) still carries float round-off.
_BOUND_ATOL = 1e-10


def error_constant(p: int | float | str) -> float:
    """c_p of the recovery bound: 2.5, 7.5, and 18·200^{1/p} + 3 for p >= 3."""
    p = normalize_norm_index(p)
    if math.isinf(p):
        raise ValidationError("The recovery protocol is not defined for p = inf")
    if p == 1:
        return ERROR_CONSTANT_L1
    if p == 2:
        return ERROR_CONSTANT_L2
    return ERROR_CONSTANT_SCALE * ERROR_CONSTANT_BASE ** (1.0 / p) + ERROR_CONSTANT_SHIFT


@dataclass(frozen=True)
class ProtocolConfig:
    """Parameters of one protocol run.

    Attributes:
        p: Norm index (finite).
        k: Number of archetypes.
        n: Number of bidders sharing the failure budget.
        delta: Total failure probability in (0, 1).
        s_override: Fixed sample count replacing the formula.
        reps: Boosting repetitions (default ``ceil(ln(n/delta))``).
        sample_constant: Leading constant of the sample formula
            (default ``SAMPLE_CONSTANT``).
        full_sampling: Query every entry once instead of sampling.
    """

    p: NormIndex
    k: int
    n: int = 1
    delta: float = 0.1
    s_override: int | None = None
    reps: int | None = None
    sample_constant: float | None = None
    full_sampling: bool = False

    def __post_init__(self) -> None:
        p = normalize_norm_index(self.p)
        if math.isinf(p):
            raise ValidationError("The recovery protocol is not defined for p = inf")
        object.__setattr__(self, "p", p)
        if not 0.0 < self.delta < 1.0:
            raise ValidationError(f"delta must lie in (0, 1), got {self.delta}")
        if self.k < 1 or self.n < 1:
            raise ValidationError("k and n must be >= 1")
        if self.s_override is not None and self.s_override < 1:
            raise ValidationError("s_override must be >= 1")
        if self.reps is not None and self.reps < 1:
            raise ValidationError("reps must be >= 1")

    @property
    def effective_reps(self) -> int:
        if self.reps is not None:
            return self.reps
        return max(1, math.ceil(math.log(self.n / self.delta)))

    @property
    def effective_sample_constant(self) -> float:
        if self.sample_constant is not None:
            return float(self.sample_constant)
        return float(get_env_from_schema("SAMPLE_CONSTANT"))


class TypeOracle:
    """Entry access to one bidder's observed type ``t + noise``.

    The underlying entry function is called at most once per index; repeated
    queries return the cached value, so noise is fixed per instance. Safe to
    call from several threads.

    Attributes:
        d: Type dimension.
        eps_mdl: Declared bound on ‖t - A z‖_p.
        eps_nq: Declared bound on ‖noise‖_p.
        p: Norm index of the declared bounds.
        z_true: Ground-truth latent vector, when known.
    """

    def __init__(
        self,
        entry_fn: Callable[[int], float],
        d: int,
        *,
        eps_mdl: float = 0.0,
        eps_nq: float = 0.0,
        p: int | float | str = 2,
        z_true: np.ndarray | None = None,
    ) -> None:
        if eps_mdl < 0.0 or eps_nq < 0.0:
            raise ValidationError("Error bounds must be nonnegative")
        self._entry_fn = entry_fn
        self.d = int(d)
        self.eps_mdl = float(eps_mdl)
        self.eps_nq = float(eps_nq)
        self.p = normalize_norm_index(p)
        self.z_true = None if z_true is None else np.asarray(z_true, dtype=float).copy()
        self._cache: dict[int, float] = {}
        self._requests = 0
        self._lock = threading.Lock()

    @classmethod
    def from_vector(
        cls,
        values: Any,
        *,
        eps_mdl: float = 0.0,
        eps_nq: float = 0.0,
        p: int | float | str = 2,
        z_true: np.ndarray | None = None,
    ) -> TypeOracle:
        """Oracle over a materialized observed vector."""
        vec = as_vector(values).copy()
        vec.setflags(write=False)
        return cls(
            lambda j: float(vec[j]),
            vec.shape[0],
            eps_mdl=eps_mdl,
            eps_nq=eps_nq,
            p=p,
            z_true=z_true,
        )

    def __call__(self, j: int) -> float:
        j = int(j)
        if not 0 <= j < self.d:
            raise ValidationError(f"Entry index {j} outside [0, {self.d})")
        with self._lock:
            self._requests += 1
            if j not in self._cache:
                self._cache[j] = float(self._entry_fn(j))
            return self._cache[j]

    @property
    def requests(self) -> int:
        """Entry requests received, repeats included."""
        return self._requests

    @property
    def distinct(self) -> int:
        """Distinct entries read from the underlying type."""
        return len(self._cache)


def exact_norm_vector(d: int, radius: float, p: NormIndex, rng: np.random.Generator) -> np.ndarray:
    """Random direction scaled to ℓp norm exactly *radius* (zeros when radius is 0)."""
    if radius == 0.0:
        return np.zeros(d)
    g = rng.standard_normal(d)
    return g * (radius / lp_norm(g, p))


def make_type_oracle(
    A: Any,
    z0: Any,
    eps_mdl: float,
    eps_nq: float,
    p: int | float | str,
    rng: np.random.Generator,
) -> TypeOracle:
    """Materialize ``t = A z0 + e_mdl`` and noise ``e_nq`` with the declared norms.

    Both error vectors have ℓp norm exactly equal to their bound, so bound
    checks are exercised on their tight side.
    """
    am = ArchetypeMatrix.wrap(A)
    p = normalize_norm_index(p)
    z = as_vector(z0, am.k)
    t = am.data @ z + exact_norm_vector(am.d, eps_mdl, p, rng)
    noise = exact_norm_vector(am.d, eps_nq, p, rng)
    return TypeOracle.from_vector(t + noise, eps_mdl=eps_mdl, eps_nq=eps_nq, p=p, z_true=z)


@dataclass
class RecoveryResult:
    """Outcome of :func:`recover_latent` for one bidder.

    Attributes:
        z_hat: Recovered latent vector.
        queries_used: Entry requests, ``(reps + 1) * sample_count``.
        zeta_bound: Error bound zeta_p (``inf`` when sigma_min,p is unavailable).
        within_bound: ``error <= zeta_bound``; None when the truth is unknown.
        sample_count: Rows per sketch.
        reps: Boosting repetitions (0 for full sampling).
        distinct_queries: Distinct entries read during this recovery.
        error: ‖z - ẑ‖_p when the truth is known.
        converged: Whether the selected solve converged.
        sigma: sigma_min,p(A) used for the bound.
    """

    z_hat: np.ndarray
    queries_used: int
    zeta_bound: float
    within_bound: bool | None
    sample_count: int
    reps: int
    distinct_queries: int
    error: float | None = None
    converged: bool = True
    sigma: SigmaMinP | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "z_hat": self.z_hat.tolist(),
            "queries_used": self.queries_used,
            "zeta_bound": self.zeta_bound,
            "within_bound": self.within_bound,
            "sample_count": self.sample_count,
            "reps": self.reps,
            "distinct_queries": self.distinct_queries,
            "error": self.error,
            "converged": self.converged,
            "sigma": None if self.sigma is None else self.sigma.to_dict(),
        }


def recovery_error_bound(
    A: Any,
    p: int | float | str,
    eps_mdl: float,
    eps_nq: float,
    *,
    sigma: float | None = None,
) -> float:
    """zeta_p = c_p (eps_mdl + eps_nq) / sigma_min,p(A).

    Args:
        A: Archetype matrix.
        p: Finite norm index.
        eps_mdl: Model-error bound.
        eps_nq: Query-noise bound.
        sigma: Precomputed sigma_min,p(A) (computed when omitted).

    Raises:
        SingularDesignError: If sigma_min,p(A) is numerically zero.
    """
    am = ArchetypeMatrix.wrap(A)
    c = error_constant(p)
    if sigma is None:
        sigma = am.sigma_min(p).value
    scale = float(sla.svdvals(am.data)[0])
    if sigma <= float(get_env_from_schema("RANK_TOL")) * scale:
        raise SingularDesignError(f"sigma_min,{p}(A) = {sigma:.3g} is numerically zero")
    return c * (eps_mdl + eps_nq) / sigma


def sample_complexity(cfg: ProtocolConfig) -> int:
    """Rows per sketch.

    s_1 = s_2 = ceil(C k ln k ln(n/δ)) + k and s_p = ceil(C k^{p/2} ln³k ln(n/δ)) + k.
    """
    if cfg.s_override is not None:
        return int(cfg.s_override)
    c = cfg.effective_sample_constant
    k = cfg.k
    log_fail = math.log(cfg.n / cfg.delta)
    log_k = math.log(k)
    if cfg.p <= 2:
        base = c * k * log_k * log_fail
    else:
        base = c * k ** (cfg.p / 2.0) * log_k**3 * log_fail
    return int(math.ceil(base)) + k


@dataclass(frozen=True)
class LinfDiagnostic:
    """ℓ∞ recovery bound for a realized ℓ2 plan.

    Attributes:
        bound: ``sqrt(s) (eps_nq + eps_mdl) max(rescale) / sigma_min(D S A)``.
        rescale_max: ‖D‖_∞, the largest rescaling factor.
        sigma_sketch: Smallest singular value of the sketched matrix.
        s: Rows in the plan.
    """

    bound: float
    rescale_max: float
    sigma_sketch: float
    s: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "bound": self.bound,
            "rescale_max": self.rescale_max,
            "sigma_sketch": self.sigma_sketch,
            "s": self.s,
        }


def linf_diagnostic(A: Any, plan: SamplePlan, eps_mdl: float, eps_nq: float) -> LinfDiagnostic:
    """Evaluate the ℓ∞ error bound of a least-squares solve on a given plan.

    Raises:
        ValidationError: If the plan is not an ℓ2 plan.
        RankDeficientError: If the sketched matrix is rank deficient.
    """
    if plan.p != 2:
        raise ValidationError("The ℓ∞ diagnostic applies to ℓ2 plans")
    sa = apply_plan(plan, np.asarray(A, dtype=float))
    sv = sla.svdvals(sa)
    rtol = float(get_env_from_schema("RANK_TOL"))
    if sv.size < sa.shape[1] or sv[0] == 0.0 or sv[-1] <= rtol * sv[0]:
        raise RankDeficientError("Sketched matrix is rank deficient")
    rescale_max = float(np.max(plan.rescale))
    bound = math.sqrt(plan.s) * (eps_nq + eps_mdl) * rescale_max / float(sv[-1])
    return LinfDiagnostic(
        bound=bound, rescale_max=rescale_max, sigma_sketch=float(sv[-1]), s=plan.s
    )


def _sigma_for_bound(am: ArchetypeMatrix, p: NormIndex) -> SigmaMinP | None:
    try:
        return am.sigma_min(p)
    except InfeasibleError as exc:
        logger.warning("No zeta bound: %s", exc)
        return None


def recover_latent(
    A: Any,
    oracle: TypeOracle,
    cfg: ProtocolConfig,
    rng: np.random.Generator,
    *,
    max_workers: int = 1,
) -> RecoveryResult:
    """Recover one bidder's latent vector from few entry queries.

    Samples rows by leverage scores (p = 2) or Lewis weights (p != 2) and
    runs :func:`boosted_solve`; with ``cfg.full_sampling`` every entry is
    queried once instead.

    Raises:
        ShapeMismatchError: If A, the oracle and cfg disagree on d or k.
    """
    am = ArchetypeMatrix.wrap(A)
    if cfg.k != am.k:
        raise ShapeMismatchError(f"Config has k={cfg.k}, matrix has k={am.k}")
    if oracle.d != am.d:
        raise ShapeMismatchError(f"Oracle has d={oracle.d}, matrix has d={am.d}")
    p = cfg.p
    distinct_before = oracle.distinct

    if cfg.full_sampling:
        sol = sketched_solve(am.data, oracle, p, full_plan(am.d, p))
        sample_count, reps, queries_used = am.d, 0, am.d
    else:
        scores, inflation = am.sampling_scores(p)
        sample_count = sample_complexity(cfg) * inflation
        reps = cfg.effective_reps
        sol = boosted_solve(
            am.data,
            oracle,
            p,
            sample_count,
            reps,
            rng,
            probabilities=scores.probabilities,
            max_workers=max_workers,
        )
        queries_used = sol.queries_requested

    sigma = _sigma_for_bound(am, p)
    zeta = math.inf
    if sigma is not None:
        try:
            zeta = recovery_error_bound(am, p, oracle.eps_mdl, oracle.eps_nq, sigma=sigma.value)
        except SingularDesignError as exc:
            logger.warning("No zeta bound: %s", exc)

    error: float | None = None
    within: bool | None = None
    if oracle.z_true is not None:
        error = lp_norm(oracle.z_true - sol.z, p)
        within = None if math.isinf(zeta) else bool(error <= zeta + _BOUND_ATOL)

    return RecoveryResult(
        z_hat=sol.z,
        queries_used=int(queries_used),
        zeta_bound=zeta,
        within_bound=within,
        sample_count=int(sample_count),
        reps=reps,
        distinct_queries=oracle.distinct - distinct_before,
        error=error,
        converged=sol.converged,
        sigma=sigma,
    )


def recover_bidders(
    A: Any,
    oracles: Sequence[TypeOracle],
    cfg: ProtocolConfig,
    master_seed: int,
    *,
    stream: Sequence[int] = (),
    max_workers: int = 1,
) -> list[RecoveryResult]:
    """Run :func:`recover_latent` for every bidder, each on its own RNG stream.

    Bidder i uses the stream ``(master_seed, *stream, i)``. Results are
    returned in bidder order whatever *max_workers* is.

    Raises:
        RankDeficientError: Propagated from a bidder's recovery.
    """
    am = ArchetypeMatrix.wrap(A)
    # Warm the shared caches before fanning out.
    am.sampling_scores(cfg.p)
    _sigma_for_bound(am, cfg.p)

    def _one(i: int) -> RecoveryResult:
        return recover_latent(am, oracles[i], cfg, derive_rng(master_seed, *stream, i))

    indices = range(len(oracles))
    if max_workers > 1 and len(oracles) > 1:
        with ThreadPoolExecutor(
            max_workers=min(max_workers, len(oracles)), thread_name_prefix="bidder"
        ) as pool:
            results = list(pool.map(_one, indices))
    else:
        results = [_one(i) for i in indices]
    logger.info(
        "Recovered %d bidders (p=%s, %d queries each)",
        len(results),
        format_norm_index(cfg.p),
        results[0].queries_used if results else 0,
    )
    return results
