"""Per-trial records, aggregates and report files of an experiment."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from utils import dumps_json, export_csv_to_path, export_json_to_path, get_logger

logger = get_logger(__name__)

RECOVERY_SUCCESS_TARGET = 0.9

TRIAL_COLUMNS: tuple[str, ...] = (
    "trial",
    "failed",
    "error",
    "recovery_error",
    "zeta_bound",
    "queries_used",
    "within_bound",
    "ir_violation",
    "eta",
    "mu",
    "eta_pred",
    "mu_pred",
    "revenue",
    "base_revenue",
    "revenue_bound",
    "rho_exact",
)


@dataclass
class TrialRecord:
    """Everything measured in one trial.

    Recovery fields are the worst case over bidders. Mechanism fields stay
    None in recovery scenarios and when audits are off.
    """

    trial: int
    failed: bool = False
    error: str | None = None
    recovery_error: float | None = None
    zeta_bound: float | None = None
    queries_used: int | None = None
    within_bound: bool | None = None
    bidders: list[dict[str, Any]] = field(default_factory=list)
    ell: list[float] | None = None
    delta: float | None = None
    zeta: float | None = None
    rho_exact: float | None = None
    stage_ir: dict[str, float] = field(default_factory=dict)
    ir_violation: float | None = None
    eta: float | None = None
    mu: float | None = None
    eta_pred: float | None = None
    mu_pred: float | None = None
    m1_eta: float | None = None
    m1_eta_bound: float | None = None
    base_eta: float | None = None
    revenue: float | None = None
    base_revenue: float | None = None
    revenue_bound: float | None = None
    auction: dict[str, Any] | None = None
    checks: dict[str, bool] = field(default_factory=dict)

    @classmethod
    def failure(cls, trial: int, exc: Exception) -> TrialRecord:
        return cls(trial=trial, failed=True, error=f"{type(exc).__name__}: {exc}")

    def to_dict(self) -> dict[str, Any]:
        return dict(self.__dict__)

    def row(self) -> list[Any]:
        return [getattr(self, name) for name in TRIAL_COLUMNS]


def _mean_stderr(values: Sequence[float]) -> tuple[float | None, float | None]:
    finite = [v for v in values if v is not None and math.isfinite(v)]
    if not finite:
        return None, None
    arr = np.asarray(finite, dtype=float)
    stderr = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
    return float(arr.mean()), stderr


def _rate(records: Sequence[TrialRecord], check: str) -> float | None:
    """Fraction of trials passing a check; failed trials count as not passing."""
    relevant = [r for r in records if r.failed or check in r.checks]
    if not relevant:
        return None
    return sum(1 for r in relevant if r.checks.get(check, False)) / len(relevant)


@dataclass
class ExperimentReport:
    """Scenario, trial records and their aggregates."""

    scenario: dict[str, Any]
    records: list[TrialRecord]
    aggregates: dict[str, Any] = field(default_factory=dict)
    assertions: dict[str, bool] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.aggregates:
            self.aggregates = self._aggregate()
        if not self.assertions:
            self.assertions = self._assertions()

    @property
    def passed(self) -> bool:
        return all(self.assertions.values())

    def _aggregate(self) -> dict[str, Any]:
        records = self.records
        error_mean, error_stderr = _mean_stderr([r.recovery_error for r in records])
        revenue_mean, revenue_stderr = _mean_stderr([r.revenue for r in records])
        queries = [r.queries_used for r in records if r.queries_used is not None]
        return {
            "trials": len(records),
            "failed_trials": sum(1 for r in records if r.failed),
            "recovery_success_rate": _rate(records, "recovery"),
            "recovery_error_mean": error_mean,
            "recovery_error_stderr": error_stderr,
            "queries_used_max": max(queries) if queries else None,
            "ir_pass_rate": _rate(records, "ir"),
            "bic_pass_rate": _rate(records, "bic"),
            "round_down_bic_pass_rate": _rate(records, "m1_bic"),
            "revenue_pass_rate": _rate(records, "revenue"),
            "revenue_mean": revenue_mean,
            "revenue_stderr": revenue_stderr,
        }

    def _assertions(self) -> dict[str, bool]:
        agg = self.aggregates
        assertions = {"no_failed_trials": agg["failed_trials"] == 0}
        if agg["recovery_success_rate"] is not None:
            assertions["recovery_within_bound"] = (
                agg["recovery_success_rate"] >= RECOVERY_SUCCESS_TARGET
            )
        for key, name in (
            ("ir_pass_rate", "ir_exact"),
            ("bic_pass_rate", "bic_within_bounds"),
            ("round_down_bic_pass_rate", "round_down_bic_within_bound"),
            ("revenue_pass_rate", "revenue_within_bound"),
        ):
            if agg[key] is not None:
                assertions[name] = agg[key] == 1.0
        return assertions

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenario": self.scenario,
            "aggregates": self.aggregates,
            "assertions": self.assertions,
            "trials": [r.to_dict() for r in self.records],
        }

    def to_json(self) -> str:
        return dumps_json(self.to_dict())

    def write(self, out_dir: Path, basename: str = "report") -> dict[str, Path]:
        """Write ``<basename>.json``, ``<basename>_trials.csv`` and ``<basename>_summary.csv``."""
        out_dir = Path(out_dir)
        paths = {
            "json": export_json_to_path(self.to_dict(), out_dir / f"{basename}.json"),
            "trials": export_csv_to_path(
                TRIAL_COLUMNS, [r.row() for r in self.records], out_dir / f"{basename}_trials.csv"
            ),
            "summary": export_csv_to_path(
                ("metric", "value"),
                [[k, v] for k, v in {**self.aggregates, **self.assertions}.items()],
                out_dir / f"{basename}_summary.csv",
            ),
        }
        return paths
