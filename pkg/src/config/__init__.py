"""Configuration module for ArchetypeLab."""

from config.constants import (
    APP_NAME,
    APP_VERSION,
    ARCHETYPE_FAMILIES,
    AUDIT_TOLERANCE,
    MECHANISM_KINDS,
    SCENARIO_MODES,
    VALUATION_FAMILIES,
)
from config.env import (
    DEFAULT_LOG_FILE,
    DEFAULT_LOG_LEVEL,
    ENV_SCHEMA,
    SCHEMA_BY_KEY,
    EnvSetting,
    clear_env_cache,
    get_current_env_values,
    get_env,
    get_env_from_schema,
    initialize_and_validate_config,
    validate_setting,
    write_env_file,
)
from config.paths import (
    generate_output_basename,
    get_env_path,
    get_output_dir,
    get_project_root,
    get_scenarios_dir,
)

__all__ = [
    # constants
    "APP_NAME",
    "APP_VERSION",
    "ARCHETYPE_FAMILIES",
    "AUDIT_TOLERANCE",
    "MECHANISM_KINDS",
    "SCENARIO_MODES",
    "VALUATION_FAMILIES",
    # env
    "DEFAULT_LOG_FILE",
    "DEFAULT_LOG_LEVEL",
    "ENV_SCHEMA",
    "SCHEMA_BY_KEY",
    "EnvSetting",
    "clear_env_cache",
    "get_current_env_values",
    "get_env",
    "get_env_from_schema",
    "initialize_and_validate_config",
    "validate_setting",
    "write_env_file",
    # paths
    "generate_output_basename",
    "get_env_path",
    "get_output_dir",
    "get_project_root",
    "get_scenarios_dir",
]
