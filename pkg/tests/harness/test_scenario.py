"""Tests for harness.scenario."""

from __future__ import annotations

import json
import math
from pathlib import Path

import pytest

import harness.scenario as scenario_module
from harness import (
    MechanismSpec,
    ScenarioConfig,
    load_predefined_scenarios,
    load_scenario,
    resolve_scenario,
)
from utils import ValidationError


@pytest.fixture
def fresh_catalog(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(scenario_module, "_cache", None)


class TestScenarioConfig:
    def test_defaults(self) -> None:
        cfg = ScenarioConfig()
        assert cfg.mode == "recovery"
        assert cfg.p == 2
        assert cfg.mhat == MechanismSpec()

    def test_p_normalized(self) -> None:
        assert math.isinf(ScenarioConfig(p="inf").p)
        assert ScenarioConfig(p="inf").to_dict()["p"] == "inf"

    @pytest.mark.parametrize(
        "changes",
        [
            {"mode": "auction"},
            {"family": "sparse"},
            {"family": "from_file"},
            {"d": 2, "k": 3},
            {"trials": 0},
            {"threads": 0},
            {"eps_mdl": -0.1},
            {"value_queries": True, "eps_nq": 0.1},
            {"delta": 1.0},
            {"zeta_override": -1.0},
            {"latent_shift": 1.0},
            {"mode": "mechanism", "d": 3, "mhat": MechanismSpec(items=2)},
        ],
    )
    def test_invalid(self, changes: dict) -> None:
        with pytest.raises(ValidationError):
            ScenarioConfig(**changes)

    def test_effective_threads(self, monkeypatch: pytest.MonkeyPatch) -> None:
        assert ScenarioConfig(threads=3).effective_threads == 3
        monkeypatch.setenv("DEFAULT_THREADS", "4")
        assert ScenarioConfig().effective_threads == 4

    def test_replace_ignores_none(self) -> None:
        cfg = ScenarioConfig(seed=3, trials=2)
        changed = cfg.replace(seed=9, trials=None)
        assert changed.seed == 9
        assert changed.trials == 2

    def test_from_dict_rejects_unknown_keys(self) -> None:
        with pytest.raises(ValidationError, match="Unknown scenario keys: colour"):
            ScenarioConfig.from_dict({"colour": "red"})

    def test_dict_round_trip(self) -> None:
        cfg = ScenarioConfig(
            mode="mechanism", d=2, k=2, n=2, mhat=MechanismSpec(items=2), eps_grid=(0.1,)
        )
        assert ScenarioConfig.from_dict(cfg.to_dict()) == cfg


def test_mechanism_spec_validation() -> None:
    assert MechanismSpec(items=3, valuation="table").type_dimension == 7
    with pytest.raises(ValidationError):
        MechanismSpec(kind="vcg")
    with pytest.raises(ValidationError):
        MechanismSpec(items=2, item=2)
    with pytest.raises(ValidationError):
        MechanismSpec(reserve=-1.0)


def test_load_yaml_and_json(tmp_path: Path) -> None:
    yaml_path = tmp_path / "small.yaml"
    yaml_path.write_text("d: 20\nk: 2\np: inf\nmatrix_path: A.csv\nfamily: from_file\n")
    cfg = load_scenario(yaml_path)
    assert cfg.name == "small"
    assert math.isinf(cfg.p)
    assert cfg.resolve_matrix_path() == tmp_path.resolve() / "A.csv"

    json_path = tmp_path / "other.json"
    json_path.write_text(json.dumps({"name": "x", "d": 10, "k": 1}))
    assert load_scenario(json_path).name == "x"


def test_load_rejects_non_mapping(tmp_path: Path) -> None:
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n")
    with pytest.raises(ValidationError, match="mapping"):
        load_scenario(path)
    with pytest.raises(ValidationError, match="Cannot read"):
        load_scenario(tmp_path / "missing.yaml")


@pytest.mark.usefixtures("fresh_catalog")
def test_predefined_catalog() -> None:
    catalog = load_predefined_scenarios()
    assert {"mechanism_toy", "mechanism_menu", "recovery_p1", "recovery_p2", "recovery_p3"} <= set(
        catalog
    )
    toy = catalog["mechanism_toy"]
    assert toy.mode == "mechanism"
    assert toy.zeta_override == 0.04
    assert toy.resolve_matrix_path().name == "toy_archetypes.csv"
    assert load_predefined_scenarios() is catalog


@pytest.mark.usefixtures("fresh_catalog")
def test_resolve_scenario(tmp_path: Path) -> None:
    assert resolve_scenario("recovery_p2").p == 2
    path = tmp_path / "mine.yaml"
    path.write_text("d: 5\nk: 1\n")
    assert resolve_scenario(str(path)).name == "mine"
    with pytest.raises(ValidationError, match="known:"):
        resolve_scenario("no_such_scenario")
