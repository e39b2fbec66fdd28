"""Environment settings: schema, parsing, validation and the startup cache.

Numerical tolerances, iteration caps, resource limits and logging are read
from ``.env`` in the project root. Every key is declared once in
``ENV_SCHEMA``; a missing or invalid value falls back to its default.
"""

import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Type, Union

from config.constants import LOG_LEVELS

_EnvCastType = Type[Union[str, int, float, bool]]

try:
    from dotenv import load_dotenv

    _env_path = Path(__file__).resolve().parent.parent.parent / ".env"
    load_dotenv(dotenv_path=_env_path, override=True)
except ImportError:
    pass


DEFAULT_LOG_LEVEL: str = "INFO"
DEFAULT_LOG_FILE: str = "archetype_lab.log"

_TRUE_WORDS = ("true", "1", "yes", "on")


@dataclass(frozen=True)
class EnvSetting:
    """One ``.env`` key.

    Attributes:
        key: Variable name.
        default: Value used when the variable is unset or invalid.
        cast_type: ``str``, ``int``, ``float`` or ``bool``.
        section: Heading the key is grouped under in written ``.env`` files.
        description: One-line meaning, written as a comment.
        min: Inclusive lower bound for numbers.
        max: Inclusive upper bound for numbers.
        positive: Reject zero (tolerances and scale constants).
        options: Allowed values for strings, compared case-insensitively
            and returned in their canonical spelling.
    """

    key: str
    default: Any
    cast_type: _EnvCastType
    section: str
    description: str
    min: float | None = None
    max: float | None = None
    positive: bool = False
    options: tuple[str, ...] | None = None


ENV_SCHEMA: tuple[EnvSetting, ...] = (
    EnvSetting(
        "RANK_TOL", 1e-10, float, "linear algebra",
        "Singular values below RANK_TOL * sigma_max count as zero.",
        min=0.0, max=1e-2,
    ),
    EnvSetting(
        "LEWIS_TOL", 1e-6, float, "linear algebra",
        "Max-norm residual at which the Lewis-weight iteration stops.",
        max=1e-1, positive=True,
    ),
    EnvSetting(
        "LEWIS_MAX_ITER", 500, int, "linear algebra",
        "Iteration cap for Lewis weights; beyond it sampling uses 2x samples.",
        min=1,
    ),
    EnvSetting(
        "SIGMA_RESTARTS", 20, int, "linear algebra",
        "Random restarts of the sphere search estimating sigma_min,p (p >= 3).",
        min=1,
    ),
    EnvSetting(
        "SIGMA_TOL", 1e-8, float, "linear algebra",
        "Relative improvement at which one sphere-search restart stops.",
        max=1e-1, positive=True,
    ),
    EnvSetting(
        "SIGMA_ORTHANT_MAX_K", 20, int, "linear algebra",
        "Largest k for the exact sign-orthant computation of sigma_min,1.",
        min=1, max=30,
    ),
    EnvSetting(
        "IRLS_TOL", 1e-10, float, "regression",
        "Relative loss change at which IRLS (p >= 3) is declared converged.",
        max=1e-1, positive=True,
    ),
    EnvSetting(
        "IRLS_MAX_ITER", 200, int, "regression",
        "Iteration cap for IRLS; the best iterate is returned when reached.",
        min=1,
    ),
    EnvSetting(
        "IRLS_SMOOTHING", 1e-10, float, "regression",
        "Floor added to |residual| before raising it to the power p - 2.",
        min=0.0,
    ),
    EnvSetting(
        "SAMPLE_CONSTANT", 8.0, float, "regression",
        "Leading constant of the sample-count formulas s_1, s_2 and s_p.",
        positive=True,
    ),
    EnvSetting(
        "PROKHOROV_TOL", 1e-4, float, "distributions and audits",
        "Accuracy of the Prokhorov distance search.",
        max=1e-1, positive=True,
    ),
    EnvSetting(
        "PROKHOROV_MAX_PAIRS", 10000, int, "distributions and audits",
        "Largest support-size product accepted by the Prokhorov LP.",
        min=1,
    ),
    EnvSetting(
        "AUDIT_MAX_PROFILES", 1000000, int, "distributions and audits",
        "Largest number of type profiles enumerated by exact audits.",
        min=1,
    ),
    EnvSetting(
        "DEFAULT_THREADS", 1, int, "experiments",
        "Worker threads used when the CLI gets no --threads flag.",
        min=1, max=256,
    ),
    EnvSetting(
        "LOG_LEVEL", DEFAULT_LOG_LEVEL, str, "logging",
        "Logging verbosity: DEBUG, INFO, WARNING, ERROR, CRITICAL.",
        options=LOG_LEVELS,
    ),
    EnvSetting(
        "LOG_FILE", DEFAULT_LOG_FILE, str, "logging",
        "Name of the log file written to the project root.",
    ),
    EnvSetting(
        "LOG_CONSOLE", False, bool, "logging",
        "Also print log messages to the terminal console.",
    ),
)

SCHEMA_BY_KEY: dict[str, EnvSetting] = {item.key: item for item in ENV_SCHEMA}

# Validated values, filled at startup and on first lookup.
_VALIDATED_CACHE: dict[str, Any] = {}


def _cast(raw: str, cast_type: _EnvCastType) -> Any:
    """Parse a raw string; raises ``ValueError`` when it cannot be parsed."""
    if cast_type is bool:
        return raw.strip().lower() in _TRUE_WORDS
    return cast_type(raw.strip()) if cast_type is not str else raw


def validate_setting(setting: EnvSetting, value: Any) -> tuple[bool, Any]:
    """Check an already-cast value against its setting.

    Returns:
        ``(is_valid, value)``: the canonical value when valid, else the default.
    """
    reject = (False, setting.default)
    if value is None:
        return reject

    if setting.cast_type is str:
        text = str(value).strip()
        if not text:
            return reject
        if setting.options is not None:
            by_upper = {opt.upper(): opt for opt in setting.options}
            if text.upper() not in by_upper:
                return reject
            return True, by_upper[text.upper()]
        return True, text

    if setting.cast_type is bool:
        return (True, value) if isinstance(value, bool) else reject

    try:
        number = setting.cast_type(value)
    except (TypeError, ValueError, OverflowError):
        return reject
    if isinstance(number, float) and not math.isfinite(number):
        return reject
    if setting.min is not None and number < setting.min:
        return reject
    if setting.max is not None and number > setting.max:
        return reject
    if setting.positive and number <= 0:
        return reject
    return True, number


def _read(setting: EnvSetting) -> tuple[Any, bool]:
    """Current value of *setting* and whether a set variable had to be replaced."""
    raw = os.getenv(setting.key)
    if raw is None:
        return setting.default, False
    try:
        casted = _cast(raw, setting.cast_type)
    except (TypeError, ValueError, OverflowError):
        return setting.default, True
    valid, value = validate_setting(setting, casted)
    return value, not valid


def get_env(
    key: str,
    default: Any,
    cast_type: _EnvCastType = str,
) -> Union[str, int, float, bool]:
    """Read a variable, validated against ``ENV_SCHEMA`` when the key is declared there.

    Undeclared keys are only cast; *default* is returned when the variable is
    missing or cannot be cast.
    """
    setting = SCHEMA_BY_KEY.get(key)
    if setting is not None:
        return _read(setting)[0]
    raw = os.getenv(key)
    if raw is None:
        return default
    try:
        return _cast(raw, cast_type)
    except (TypeError, ValueError, OverflowError):
        return default


def get_env_from_schema(key: str) -> Any:
    """Validated value of a declared key, cached after the first lookup.

    Raises:
        KeyError: If *key* is not in ``ENV_SCHEMA``.
    """
    if key in _VALIDATED_CACHE:
        return _VALIDATED_CACHE[key]
    setting = SCHEMA_BY_KEY.get(key)
    if setting is None:
        raise KeyError(f"Unknown env key: {key}")
    value = _read(setting)[0]
    _VALIDATED_CACHE[key] = value
    return value


def clear_env_cache() -> None:
    """Drop validated values so the next lookup re-reads the environment."""
    _VALIDATED_CACHE.clear()


def _validate_all_env_values() -> dict[str, tuple[Any, bool]]:
    """Validate every declared key and fill the cache.

    Returns:
        Mapping of key to ``(value, was_corrected)``.
    """
    results: dict[str, tuple[Any, bool]] = {}
    for setting in ENV_SCHEMA:
        value, corrected = _read(setting)
        _VALIDATED_CACHE[setting.key] = value
        results[setting.key] = (value, corrected)
    return results


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def get_current_env_values() -> dict[str, str]:
    """Current validated value of every declared key, as ``.env`` strings."""
    return {s.key: _format_value(get_env_from_schema(s.key)) for s in ENV_SCHEMA}


def write_env_file(env_path: Path, values: dict[str, str] | None = None) -> None:
    """Write a ``.env`` file grouped by section, each key preceded by its description.

    Keys are written in schema order. With *values* omitted every key gets its
    default (the layout of ``.env.example``); otherwise keys missing from
    *values* are skipped.
    """
    lines = [
        "# ArchetypeLab configuration",
        "# See docs/configuration.md for the meaning of every key.",
    ]
    section = None
    for setting in ENV_SCHEMA:
        if values is None:
            value = _format_value(setting.default)
        elif setting.key in values:
            value = values[setting.key].strip()
        else:
            continue
        if setting.section != section:
            section = setting.section
            lines += ["", f"# --- {section} ---"]
        if " " in value or "#" in value or "\n" in value:
            value = f'"{value}"'
        lines += [f"# {setting.description}", f"{setting.key}={value}"]
    env_path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def initialize_and_validate_config() -> None:
    """Validate every declared key at startup and log the ones replaced by defaults."""
    try:
        from utils import get_logger

        log = get_logger(__name__)
    except ImportError:
        import logging

        log = logging.getLogger("archetype_lab.config")

    results = _validate_all_env_values()
    corrected = [key for key, (_, was) in results.items() if was]
    if corrected:
        log.warning(
            "Corrected %d invalid env variable(s) to defaults: %s",
            len(corrected),
            ", ".join(corrected),
        )
