"""Tests for harness.report."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import pytest

from harness import ExperimentReport, TrialRecord
from harness.report import TRIAL_COLUMNS


def _record(trial: int, ok: bool = True, error: float = 0.1) -> TrialRecord:
    return TrialRecord(
        trial=trial,
        recovery_error=error,
        zeta_bound=0.5,
        queries_used=40 + trial,
        within_bound=ok,
        checks={"recovery": ok},
    )


def test_aggregates_and_assertions() -> None:
    report = ExperimentReport(scenario={"name": "t"}, records=[_record(i) for i in range(10)])
    agg = report.aggregates
    assert agg["trials"] == 10
    assert agg["recovery_success_rate"] == 1.0
    assert agg["recovery_error_mean"] == pytest.approx(0.1)
    assert agg["queries_used_max"] == 49
    assert agg["ir_pass_rate"] is None
    assert report.assertions == {"no_failed_trials": True, "recovery_within_bound": True}
    assert report.passed


def test_success_target() -> None:
    records = [_record(i, ok=i >= 2) for i in range(10)]
    report = ExperimentReport(scenario={}, records=records)
    assert report.aggregates["recovery_success_rate"] == pytest.approx(0.8)
    assert not report.assertions["recovery_within_bound"]
    assert not report.passed


def test_failed_trials_count_against_rates() -> None:
    records = [_record(0), TrialRecord.failure(1, RuntimeError("boom"))]
    report = ExperimentReport(scenario={}, records=records)
    assert report.aggregates["failed_trials"] == 1
    assert report.aggregates["recovery_success_rate"] == 0.5
    assert records[1].error == "RuntimeError: boom"
    assert not report.assertions["no_failed_trials"]


def test_mechanism_checks_must_all_pass() -> None:
    records = [
        TrialRecord(trial=0, checks={"ir": True, "bic": True, "m1_bic": True, "revenue": True}),
        TrialRecord(trial=1, checks={"ir": True, "bic": False, "m1_bic": True, "revenue": True}),
    ]
    assertions = ExperimentReport(scenario={}, records=records).assertions
    assert assertions["ir_exact"]
    assert not assertions["bic_within_bounds"]
    assert assertions["round_down_bic_within_bound"]


def test_write(tmp_path: Path) -> None:
    report = ExperimentReport(scenario={"name": "t"}, records=[_record(0), _record(1)])
    paths = report.write(tmp_path, "out")
    assert paths["json"] == tmp_path / "out.json"
    data = json.loads(paths["json"].read_text())
    assert data["aggregates"]["trials"] == 2
    assert [t["trial"] for t in data["trials"]] == [0, 1]
    with open(paths["trials"], newline="") as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == TRIAL_COLUMNS
    assert len(rows) == 3
    with open(paths["summary"], newline="") as f:
        summary = dict(csv.reader(f))
    assert summary["metric"] == "value"
    assert "no_failed_trials" in summary


def test_json_is_deterministic() -> None:
    make = lambda: ExperimentReport(scenario={"name": "t"}, records=[_record(0)])  # noqa: E731
    assert make().to_json() == make().to_json()
