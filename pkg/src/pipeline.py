"""Experiment pipeline: orchestrates instance generation, recovery, mechanism and audits.

Each trial draws everything from its own stream ``(seed, trial, ...)`` so
trials are independent of each other and of the thread count. Trial
errors are recorded in the report instead of aborting the run.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from distributions import DiscreteDist, ProductDist, round_dist
from harness import (
    ExperimentReport,
    ScenarioConfig,
    TrialRecord,
    gen_archetypes,
    gen_latent_dist,
    gen_perturbed_dist,
)
from linalg import ArchetypeMatrix
from mechanisms import (
    Mechanism,
    RobustMechanism,
    ValuationSpec,
    audit_ir,
    audit_mechanism,
    build_base_mechanism,
    build_robust,
    exact_rho,
    run_auction,
)
from regression import (
    ProtocolConfig,
    RecoveryResult,
    make_type_oracle,
    recover_bidders,
    recovery_error_bound,
)
from utils import ArchetypeLabError, derive_rng, get_logger

logger = get_logger(__name__)

# Stream keys below the trial index.
_STREAM_TYPES = 1
_STREAM_RECOVERY = 2
_STREAM_MECHANISM = 3
_STREAM_PRIOR = 4

_CHECK_SLACK = 1e-9


def protocol_config(cfg: ScenarioConfig) -> ProtocolConfig:
    return ProtocolConfig(
        p=cfg.p,
        k=cfg.k,
        n=cfg.n,
        delta=cfg.delta,
        sample_constant=cfg.sample_constant,
        full_sampling=cfg.full_sampling,
    )


def _archetypes(cfg: ScenarioConfig, trial: int) -> ArchetypeMatrix:
    rng = derive_rng(cfg.seed, trial)
    return ArchetypeMatrix(
        gen_archetypes(cfg.family, cfg.d, cfg.k, rng, cfg.resolve_matrix_path())
    )


def _recover(
    cfg: ScenarioConfig, am: ArchetypeMatrix, z_true: Sequence[np.ndarray], trial: int
) -> list[RecoveryResult]:
    oracles = [
        make_type_oracle(
            am, z, cfg.eps_mdl, cfg.eps_nq, cfg.p, derive_rng(cfg.seed, trial, _STREAM_TYPES, i)
        )
        for i, z in enumerate(z_true)
    ]
    return recover_bidders(
        am, oracles, protocol_config(cfg), cfg.seed, stream=(trial, _STREAM_RECOVERY)
    )


def _fill_recovery(record: TrialRecord, results: Sequence[RecoveryResult]) -> None:
    errors = [r.error for r in results if r.error is not None]
    record.recovery_error = max(errors) if errors else None
    record.zeta_bound = max(r.zeta_bound for r in results)
    record.queries_used = max(r.queries_used for r in results)
    flags = [r.within_bound for r in results]
    record.within_bound = None if any(f is None for f in flags) else all(flags)
    record.bidders = [r.to_dict() for r in results]
    if record.within_bound is not None:
        record.checks["recovery"] = record.within_bound


def run_recovery_trial(cfg: ScenarioConfig, trial: int) -> TrialRecord:
    """Recover n bidders' latent vectors from few queries and check the error bound."""
    am = _archetypes(cfg, trial)
    rng = derive_rng(cfg.seed, trial, _STREAM_PRIOR)
    z_true = [rng.uniform(0.0, 1.0, size=cfg.k) for _ in range(cfg.n)]
    record = TrialRecord(trial=trial)
    _fill_recovery(record, _recover(cfg, am, z_true, trial))
    return record


@dataclass
class MechanismInstance:
    """The model side (priors and base mechanism) and the true latent priors."""

    vals: ValuationSpec
    dhat: list[DiscreteDist]
    mhat: Mechanism
    f_true: list[DiscreteDist] = field(default_factory=list)


def build_instance(cfg: ScenarioConfig, am: ArchetypeMatrix) -> MechanismInstance:
    """Model priors and base mechanism; both depend only on ``dhat_seed``."""
    spec = cfg.mhat
    vals = ValuationSpec(spec.valuation, spec.items, am)
    dhat = [
        gen_latent_dist(cfg.k, cfg.support_size, derive_rng(cfg.dhat_seed, 0, i))
        for i in range(cfg.n)
    ]
    mhat = build_base_mechanism(
        spec.kind,
        ProductDist.of(dhat),
        vals,
        derive_rng(cfg.dhat_seed, 1),
        item=spec.item,
        reserve=spec.reserve,
    )
    return MechanismInstance(vals=vals, dhat=dhat, mhat=mhat)


@dataclass
class PipelineAudit:
    """Exact audits of the base mechanism, every stage and the robust mechanism."""

    stage_ir: dict[str, float]
    base_eta: float
    base_revenue: float
    m1_eta: float
    m1_eta_bound: float
    eta: float
    mu: float
    eta_pred: float
    mu_pred: float
    revenue: float
    revenue_bound: float
    rho_exact: float
    mu_curve: list[tuple[float, float]]

    @property
    def checks(self) -> dict[str, bool]:
        return {
            "ir": all(v == 0.0 for v in self.stage_ir.values()),
            "m1_bic": self.m1_eta <= self.m1_eta_bound + self.base_eta + _CHECK_SLACK,
            "bic": self.eta <= self.eta_pred and self.mu <= self.mu_pred,
            "revenue": self.revenue >= self.base_revenue - self.revenue_bound - _CHECK_SLACK,
        }

    def to_dict(self) -> dict[str, Any]:
        data = dict(self.__dict__)
        data["mu_curve"] = [{"eps": e, "mu": m} for e, m in self.mu_curve]
        data["checks"] = self.checks
        return data


def audit_pipeline(
    rm: RobustMechanism,
    instance: MechanismInstance,
    eps_grid: Sequence[float] = (),
) -> PipelineAudit:
    """Audit each stage on the distribution of its inputs.

    The round-down stage sees the rounded model prior, the TV-robust stage
    the rounded true prior, and the composed mechanism the true prior. The
    TV term ρ is computed exactly from the true prior.
    """
    vals, dhat, f_true = instance.vals, instance.dhat, instance.f_true
    rp = rm.rp
    model = ProductDist.of(dhat)
    truth = ProductDist.of(f_true)
    base = audit_mechanism(instance.mhat, model, vals)
    m1 = audit_mechanism(rm.m1, ProductDist.of([round_dist(D, rp) for D in dhat]), vals)
    m2_ir = audit_ir(rm.m2, ProductDist.of([round_dist(F, rp) for F in f_true]), vals)
    robust = audit_mechanism(rm, truth, vals, eps_grid)
    rho = exact_rho(dhat, f_true, rp)
    eta_pred, mu_pred = rm.predicted_bounds(rho)
    return PipelineAudit(
        stage_ir={
            "base": base.ir_violation,
            "round_down": m1.ir_violation,
            "tv_robust": m2_ir,
            "robust": robust.ir_violation,
        },
        base_eta=base.bic.eta,
        base_revenue=base.revenue,
        m1_eta=m1.bic.eta,
        m1_eta_bound=2.0 * rm.k * rm.a_inf * rm.lipschitz * rm.delta,
        eta=robust.bic.eta,
        mu=robust.bic.mu_at(eta_pred),
        eta_pred=eta_pred,
        mu_pred=mu_pred,
        revenue=robust.revenue,
        revenue_bound=rm.revenue_bound(rho),
        rho_exact=rho,
        mu_curve=robust.bic.curve,
    )


def robustness_radius(cfg: ScenarioConfig, am: ArchetypeMatrix) -> float:
    """ζ: the override, else the recovery error bound of the protocol."""
    if cfg.zeta_override is not None:
        return float(cfg.zeta_override)
    return recovery_error_bound(am, cfg.p, cfg.eps_mdl, cfg.eps_nq)


def run_mechanism_trial(cfg: ScenarioConfig, trial: int) -> TrialRecord:
    """Recover reports, run the robust auction once and audit every stage."""
    am = _archetypes(cfg, trial)
    instance = build_instance(cfg, am)
    zeta = robustness_radius(cfg, am)
    shift = min(zeta, 0.5) if cfg.latent_shift is None else cfg.latent_shift
    prior_rng = derive_rng(cfg.seed, trial, _STREAM_PRIOR)
    instance.f_true = [
        gen_perturbed_dist(D, shift, cfg.p, prior_rng).dist for D in instance.dhat
    ]
    z_true = [F.sample(prior_rng) for F in instance.f_true]

    record = TrialRecord(trial=trial, zeta=zeta)
    results = _recover(cfg, am, z_true, trial)
    _fill_recovery(record, results)
    reports = [r.z_hat for r in results]

    rm = build_robust(
        instance.mhat,
        instance.dhat,
        zeta,
        cfg.p,
        instance.vals.lipschitz,
        instance.vals.a_inf,
        cfg.k,
        cfg.n,
        derive_rng(cfg.seed, trial, _STREAM_MECHANISM),
        eps_mdl=cfg.eps_mdl,
        delta=cfg.rounding_delta,
    )
    record.ell = rm.ell.tolist()
    record.delta = rm.delta
    record.auction = run_auction(rm, reports).to_dict()

    if cfg.audit:
        audit = audit_pipeline(rm, instance, cfg.eps_grid)
        record.stage_ir = audit.stage_ir
        record.ir_violation = max(audit.stage_ir.values())
        for name in (
            "base_eta", "base_revenue", "m1_eta", "m1_eta_bound", "eta", "mu",
            "eta_pred", "mu_pred", "revenue", "revenue_bound", "rho_exact",
        ):
            setattr(record, name, getattr(audit, name))
        record.checks.update(audit.checks)
    return record


def run_trial(cfg: ScenarioConfig, trial: int) -> TrialRecord:
    """Run one trial; library errors mark the trial failed instead of propagating."""
    try:
        if cfg.mode == "mechanism":
            return run_mechanism_trial(cfg, trial)
        return run_recovery_trial(cfg, trial)
    except (ArchetypeLabError, np.linalg.LinAlgError) as exc:
        logger.warning("Trial %d of '%s' failed: %s", trial, cfg.name, exc)
        return TrialRecord.failure(trial, exc)


def run_experiment(cfg: ScenarioConfig) -> ExperimentReport:
    """Run every trial of a scenario and assemble the report.

    Trials run on ``cfg.effective_threads`` workers; records are merged in
    trial order, so the report does not depend on the thread count.
    """
    threads = min(cfg.effective_threads, cfg.trials)
    logger.info(
        "Experiment '%s' (%s): %d trials on %d threads, seed %d",
        cfg.name, cfg.mode, cfg.trials, threads, cfg.seed,
    )
    trials = range(cfg.trials)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads, thread_name_prefix="trial") as pool:
            records = list(pool.map(lambda t: run_trial(cfg, t), trials))
    else:
        records = [run_trial(cfg, t) for t in trials]
    report = ExperimentReport(scenario=cfg.to_dict(), records=records)
    agg = report.aggregates
    logger.info(
        "Experiment '%s' done: %d/%d trials failed, assertions %s",
        cfg.name,
        agg["failed_trials"],
        agg["trials"],
        "passed" if report.passed else "FAILED",
    )
    logger.debug("Aggregates: %s", agg)
    return report
