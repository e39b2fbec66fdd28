"""Tests for the main_program command-line entry point."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from distributions import DiscreteDist, save_dist
from linalg import save_matrix
from main_program import EXIT_ASSERTION, EXIT_ERROR, EXIT_OK, build_parser, main

_SCENARIO = """\
mode: recovery
d: 30
k: 2
n: 1
p: 2
family: gaussian
eps_mdl: 0.05
seed: 5
trials: 3
"""


@pytest.fixture
def scenario_file(tmp_path: Path) -> Path:
    path = tmp_path / "small.yaml"
    path.write_text(_SCENARIO)
    return path


@pytest.fixture
def broken_scenario(tmp_path: Path) -> Path:
    (tmp_path / "bad.csv").write_text("two,two\n")
    path = tmp_path / "broken.yaml"
    path.write_text("d: 2\nk: 2\nfamily: from_file\nmatrix_path: bad.csv\ntrials: 2\n")
    return path


def test_parser_requires_a_command() -> None:
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args([])
    assert info.value.code == 2


def test_scores_on_matrix_file(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    matrix = save_matrix([[0.6, 0.4], [0.3, 0.7], [0.5, 0.5]], tmp_path / "A.csv")
    assert main(["scores", "--matrix", str(matrix), "--p", "1"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert (payload["d"], payload["k"], payload["p"]) == (3, 2, 1)
    assert sum(payload["leverage"]["scores"]) == pytest.approx(2.0)
    assert payload["sigma_min"]["value"] > 0.0


def test_scores_writes_to_out(tmp_path: Path, scenario_file: Path) -> None:
    code = main(["scores", "--config", str(scenario_file), "--out", str(tmp_path / "o")])
    assert code == EXIT_OK
    payload = json.loads((tmp_path / "o" / "scores.json").read_text())
    assert payload["d"] == 30
    assert payload["p"] == 2


def test_prokhorov(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    first = save_dist(DiscreteDist.point_mass([0.0, 0.0]), tmp_path / "F.json")
    second = save_dist(DiscreteDist.point_mass([0.3, 0.0]), tmp_path / "G.json")
    assert main(["prokhorov", str(first), str(second)]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["prokhorov"] == pytest.approx(0.3, abs=1e-6)
    assert payload["tv"] == pytest.approx(1.0)


def test_missing_file_is_an_error(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    code = main(["prokhorov", str(tmp_path / "nope.json"), str(tmp_path / "nope.json")])
    assert code == EXIT_ERROR
    assert "Cannot read" in capsys.readouterr().err


def test_recover_needs_config(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["recover"]) == EXIT_ERROR
    err = capsys.readouterr().err
    assert "needs --config" in err
    assert "--matrix" in err


def test_unknown_scenario_name(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["experiment", "--config", "no_such_scenario"]) == EXIT_ERROR
    assert "known:" in capsys.readouterr().err


def test_recover_overrides_trials(tmp_path: Path, scenario_file: Path) -> None:
    args = ["recover", "--config", str(scenario_file), "--trials", "2", "--out", str(tmp_path)]
    assert main(args) == EXIT_OK
    report = json.loads((tmp_path / "recovery.json").read_text())
    assert report["scenario"]["mode"] == "recovery"
    assert report["aggregates"]["trials"] == 2


class TestRecoverFlags:
    @pytest.fixture
    def matrix(self, tmp_path: Path) -> Path:
        A = np.random.default_rng(0).standard_normal((40, 2))
        return save_matrix(A, tmp_path / "A.csv")

    def test_matrix_and_protocol_flags(self, tmp_path: Path, matrix: Path) -> None:
        out = tmp_path / "report.json"
        args = [
            "recover", "--matrix", str(matrix), "--p", "2", "--eps-mdl", "0.1",
            "--eps-nq", "0", "--delta", "0.1", "--n", "4", "--seed", "1",
            "--trials", "2", "--out", str(out),
        ]
        assert main(args) == EXIT_OK
        report = json.loads(out.read_text())
        scenario = report["scenario"]
        assert scenario["family"] == "from_file"
        assert (scenario["d"], scenario["k"], scenario["n"], scenario["p"]) == (40, 2, 4, 2)
        assert (scenario["eps_mdl"], scenario["eps_nq"], scenario["delta"]) == (0.1, 0.0, 0.1)
        assert scenario["seed"] == 1
        assert report["aggregates"]["trials"] == 2
        assert all(len(t["bidders"]) == 4 for t in report["trials"])

    def test_flags_override_config(self, tmp_path: Path, scenario_file: Path) -> None:
        args = [
            "recover", "--config", str(scenario_file), "--p", "1", "--eps-mdl", "0.2",
            "--n", "2", "--out", str(tmp_path),
        ]
        assert main(args) == EXIT_OK
        scenario = json.loads((tmp_path / "recovery.json").read_text())["scenario"]
        assert (scenario["p"], scenario["eps_mdl"], scenario["n"]) == (1, 0.2, 2)
        assert (scenario["family"], scenario["d"], scenario["seed"]) == ("gaussian", 30, 5)

    def test_bad_delta_is_an_error(
        self, matrix: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        assert main(["recover", "--matrix", str(matrix), "--delta", "1.5"]) == EXIT_ERROR
        assert "delta" in capsys.readouterr().err


class TestExperiment:
    def test_writes_report_files(
        self, tmp_path: Path, scenario_file: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        out = tmp_path / "run"
        assert main(["experiment", "--config", str(scenario_file), "--out", str(out)]) == EXIT_OK
        for name in ("report.json", "report_trials.csv", "report_summary.csv"):
            assert (out / name).is_file()
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "no_failed_trials: pass"
        assert all(line.endswith((": pass", ": FAIL")) for line in lines)

    def test_rerun_is_byte_identical(self, tmp_path: Path, scenario_file: Path) -> None:
        for run in ("a", "b"):
            main(["experiment", "--config", str(scenario_file), "--out", str(tmp_path / run)])
        first = (tmp_path / "a" / "report.json").read_bytes()
        assert first == (tmp_path / "b" / "report.json").read_bytes()

    def test_thread_count_does_not_change_trials(self, tmp_path: Path, scenario_file: Path) -> None:
        for run, threads in (("one", "1"), ("many", "3")):
            main(
                ["experiment", "--config", str(scenario_file), "--threads", threads,
                 "--out", str(tmp_path / run)]
            )
        one = json.loads((tmp_path / "one" / "report.json").read_text())
        many = json.loads((tmp_path / "many" / "report.json").read_text())
        assert one["trials"] == many["trials"]

    def test_check_flag_sets_exit_code(
        self, tmp_path: Path, broken_scenario: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        args = ["experiment", "--config", str(broken_scenario), "--out", str(tmp_path / "r")]
        assert main(args) == EXIT_OK
        assert main([*args, "--check"]) == EXIT_ASSERTION
        assert "no_failed_trials: FAIL" in capsys.readouterr().out


@pytest.mark.slow
def test_mech_audit(tmp_path: Path) -> None:
    code = main(["mech-audit", "--config", "mechanism_toy", "--trial", "1", "--out", str(tmp_path)])
    assert code == EXIT_OK
    record = json.loads((tmp_path / "mech_audit.json").read_text())
    assert record["trial"] == 1
    assert set(record["stage_ir"]) == {"base", "round_down", "tv_robust", "robust"}


def test_mech_audit_rejects_incompatible_scenario(broken_scenario: Path) -> None:
    code = main(["mech-audit", "--config", str(broken_scenario)])
    assert code == EXIT_ERROR
