"""Scenario configuration, instance generators and experiment reports."""

from harness.generators import (
    PerturbedDistribution,
    gen_archetypes,
    gen_latent_dist,
    gen_perturbed_dist,
)
from harness.report import RECOVERY_SUCCESS_TARGET, ExperimentReport, TrialRecord
from harness.scenario import (
    MechanismSpec,
    ScenarioConfig,
    load_predefined_scenarios,
    load_scenario,
    resolve_scenario,
)

__all__ = [
    "RECOVERY_SUCCESS_TARGET",
    "ExperimentReport",
    "MechanismSpec",
    "PerturbedDistribution",
    "ScenarioConfig",
    "TrialRecord",
    "gen_archetypes",
    "gen_latent_dist",
    "gen_perturbed_dist",
    "load_predefined_scenarios",
    "load_scenario",
    "resolve_scenario",
]
