"""Experiment scenarios: validated configuration and the predefined catalog."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from config import (
    ARCHETYPE_FAMILIES,
    MECHANISM_KINDS,
    SCENARIO_MODES,
    VALUATION_FAMILIES,
    get_env_from_schema,
    get_scenarios_dir,
)
from linalg import NormIndex, format_norm_index, normalize_norm_index
from utils import ValidationError, get_logger

logger = get_logger(__name__)

_cache: dict[str, ScenarioConfig] | None = None


@dataclass(frozen=True)
class MechanismSpec:
    """Base mechanism and valuation family of a mechanism scenario.

    Attributes:
        kind: ``second_price`` or ``random_menu``.
        items: Number of goods m.
        valuation: ``additive`` (d = m) or ``table`` (d = 2^m − 1).
        item: Auctioned item for ``second_price``.
        reserve: Reserve price for ``second_price``.
    """

    kind: str = "second_price"
    items: int = 1
    valuation: str = "additive"
    item: int = 0
    reserve: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in MECHANISM_KINDS:
            raise ValidationError(
                f"Unknown mechanism kind {self.kind!r}; choose from {MECHANISM_KINDS}"
            )
        if self.valuation not in VALUATION_FAMILIES:
            raise ValidationError(
                f"Unknown valuation family {self.valuation!r}; choose from {VALUATION_FAMILIES}"
            )
        if self.items < 1 or not 0 <= self.item < self.items:
            raise ValidationError(f"Bad item setup: items={self.items}, item={self.item}")
        if self.reserve < 0.0:
            raise ValidationError(f"reserve must be nonnegative, got {self.reserve}")

    @property
    def type_dimension(self) -> int:
        return self.items if self.valuation == "additive" else (1 << self.items) - 1


@dataclass(frozen=True)
class ScenarioConfig:
    """One experiment.

    ``recovery`` scenarios measure the query protocol alone (model error
    in type space). ``mechanism`` scenarios also build and audit the robust
    mechanism, with the true latent prior a perturbation of the model prior.

    Attributes:
        name: Scenario label.
        mode: ``recovery`` or ``mechanism``.
        d: Type dimension.
        k: Number of archetypes.
        n: Number of bidders.
        p: Norm index of the protocol and of the robustness radius.
        family: Archetype family (see ``ARCHETYPE_FAMILIES``).
        matrix_path: Matrix file for ``from_file`` (relative paths resolve
            against the scenario file's directory).
        eps_mdl: Model-error bound.
        eps_nq: Query-noise bound.
        delta: Failure probability of the protocol.
        support_size: Atoms per bidder in the model latent prior.
        dhat_seed: Seed of the model latent prior (fixed across trials).
        mhat: Base mechanism spec.
        zeta_override: Robustness radius ζ; default is the largest recovery bound.
        latent_shift: Prokhorov radius of the true latent prior around the
            model prior; default ``min(ζ, 0.5)``.
        rounding_delta: Grid width override (default √ζ).
        value_queries: Queries are exact value queries (forces eps_nq = 0).
        full_sampling: Query every type entry instead of sampling.
        seed: Master seed.
        trials: Number of independent trials.
        threads: Worker threads for trials.
        sample_constant: Leading constant of the sample formula.
        audit: Run the exact audits in mechanism mode.
        eps_grid: Regret thresholds for the μ curve.
    """

    name: str = "scenario"
    mode: str = "recovery"
    d: int = 100
    k: int = 3
    n: int = 1
    p: NormIndex = 2
    family: str = "gaussian"
    matrix_path: str | None = None
    eps_mdl: float = 0.0
    eps_nq: float = 0.0
    delta: float = 0.1
    support_size: int = 4
    dhat_seed: int = 0
    mhat: MechanismSpec = field(default_factory=MechanismSpec)
    zeta_override: float | None = None
    latent_shift: float | None = None
    rounding_delta: float | None = None
    value_queries: bool = False
    full_sampling: bool = False
    seed: int = 0
    trials: int = 1
    threads: int | None = None
    sample_constant: float | None = None
    audit: bool = True
    eps_grid: tuple[float, ...] = ()
    base_dir: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", normalize_norm_index(self.p))
        object.__setattr__(self, "eps_grid", tuple(float(e) for e in self.eps_grid))
        if self.mode not in SCENARIO_MODES:
            raise ValidationError(f"Unknown mode {self.mode!r}; choose from {SCENARIO_MODES}")
        if self.family not in ARCHETYPE_FAMILIES:
            raise ValidationError(
                f"Unknown archetype family {self.family!r}; choose from {ARCHETYPE_FAMILIES}"
            )
        if self.family == "from_file" and not self.matrix_path:
            raise ValidationError("family 'from_file' needs matrix_path")
        if self.k < 1 or self.d < self.k:
            raise ValidationError(f"Need 1 <= k <= d, got d={self.d}, k={self.k}")
        if self.n < 1 or self.trials < 1 or self.support_size < 1:
            raise ValidationError("n, trials and support_size must be positive")
        if self.threads is not None and self.threads < 1:
            raise ValidationError(f"threads must be positive, got {self.threads}")
        if self.eps_mdl < 0.0 or self.eps_nq < 0.0:
            raise ValidationError("eps_mdl and eps_nq must be nonnegative")
        if self.value_queries and self.eps_nq != 0.0:
            raise ValidationError("Value queries are exact: eps_nq must be 0")
        if not 0.0 < self.delta < 1.0:
            raise ValidationError(f"delta must lie in (0, 1), got {self.delta}")
        for key in ("zeta_override", "rounding_delta"):
            value = getattr(self, key)
            if value is not None and value < 0.0:
                raise ValidationError(f"{key} must be nonnegative, got {value}")
        if self.latent_shift is not None and not 0.0 <= self.latent_shift < 1.0:
            raise ValidationError(f"latent_shift must lie in [0, 1), got {self.latent_shift}")
        if self.mode == "mechanism" and self.mhat.type_dimension != self.d:
            raise ValidationError(
                f"{self.mhat.valuation} valuations over {self.mhat.items} items need "
                f"d={self.mhat.type_dimension}, scenario has d={self.d}"
            )

    @property
    def effective_threads(self) -> int:
        """``threads``, or DEFAULT_THREADS when unset."""
        if self.threads is not None:
            return self.threads
        return int(get_env_from_schema("DEFAULT_THREADS"))

    def resolve_matrix_path(self) -> Path | None:
        if self.matrix_path is None:
            return None
        path = Path(self.matrix_path)
        if not path.is_absolute() and self.base_dir is not None:
            path = Path(self.base_dir) / path
        return path

    def replace(self, **changes: Any) -> ScenarioConfig:
        """Copy with fields changed (``None`` values are ignored)."""
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})

    def to_dict(self) -> dict[str, Any]:
        data = dataclasses.asdict(self)
        data["p"] = format_norm_index(self.p)
        data["eps_grid"] = list(self.eps_grid)
        data.pop("base_dir")
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any], base_dir: Path | None = None) -> ScenarioConfig:
        """Build from a mapping; unknown keys are rejected.

        Raises:
            ValidationError: For unknown keys or invalid values.
        """
        data = dict(data)
        known = {f.name for f in dataclasses.fields(cls)} - {"base_dir"}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValidationError(f"Unknown scenario keys: {', '.join(unknown)}")
        mhat = data.pop("mhat", None) or {}
        if not isinstance(mhat, dict):
            raise ValidationError("mhat must be a mapping")
        try:
            return cls(
                **data,
                mhat=MechanismSpec(**mhat),
                base_dir=None if base_dir is None else str(base_dir),
            )
        except TypeError as exc:
            raise ValidationError(f"Invalid scenario: {exc}") from exc


def load_scenario(filepath: Path) -> ScenarioConfig:
    """Read a scenario from YAML or JSON (JSON is read by the YAML parser)."""
    filepath = Path(filepath)
    try:
        with open(filepath, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ValidationError(f"Cannot read scenario {filepath}: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError(f"Scenario {filepath} must hold a mapping")
    data.setdefault("name", filepath.stem)
    return ScenarioConfig.from_dict(data, base_dir=filepath.resolve().parent)


def load_predefined_scenarios() -> dict[str, ScenarioConfig]:
    """Load the scenario catalog from ``config/scenarios/*.yaml``.

    Each file maps scenario keys to scenario mappings. Results are cached
    after the first successful load.

    Raises:
        FileNotFoundError: If the scenarios directory is missing.
    """
    global _cache
    if _cache is not None:
        return _cache

    directory = get_scenarios_dir()
    if not directory.exists():
        logger.error("Scenarios directory not found: %s", directory)
        raise FileNotFoundError(f"Scenarios directory not found: {directory}")

    scenarios: dict[str, ScenarioConfig] = {}
    for filepath in sorted(directory.glob("*.yaml")):
        with open(filepath, "r", encoding="utf-8") as f:
            chunk: dict[str, Any] = yaml.safe_load(f) or {}
        for key, data in chunk.items():
            data = dict(data)
            data.setdefault("name", key)
            try:
                scenarios[key] = ScenarioConfig.from_dict(data, base_dir=directory)
            except ValidationError as exc:
                logger.warning(
                    "Scenario '%s' in %s is invalid; skipping: %s", key, filepath.name, exc
                )
                continue
            logger.debug("Loaded predefined scenario: %s", key)

    logger.info("Loaded %d predefined scenarios", len(scenarios))
    _cache = scenarios
    return scenarios


def resolve_scenario(name_or_path: str) -> ScenarioConfig:
    """A scenario file path, or the key of a predefined scenario."""
    path = Path(name_or_path)
    if path.suffix.lower() in (".yaml", ".yml", ".json") or path.exists():
        return load_scenario(path)
    catalog = load_predefined_scenarios()
    if name_or_path not in catalog:
        raise ValidationError(
            f"No scenario file or predefined scenario named {name_or_path!r}; "
            f"known: {', '.join(sorted(catalog))}"
        )
    return catalog[name_or_path]
