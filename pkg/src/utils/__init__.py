"""Utility modules for ArchetypeLab."""

from utils.exceptions import (
    ArchetypeLabError,
    BadProbabilitiesError,
    EmptyCubeError,
    InfeasibleError,
    NoConvergenceError,
    PreconditionFailedError,
    RankDeficientError,
    ShapeMismatchError,
    SingularDesignError,
    SolverFailedError,
    TooLargeError,
    ValidationError,
)
from utils.export import (
    dumps_json,
    export_csv_to_path,
    export_json_to_path,
)
from utils.logger import get_logger
from utils.rng import derive_rng, derive_seed

__all__ = [
    "ArchetypeLabError",
    "BadProbabilitiesError",
    "EmptyCubeError",
    "InfeasibleError",
    "NoConvergenceError",
    "PreconditionFailedError",
    "RankDeficientError",
    "ShapeMismatchError",
    "SingularDesignError",
    "SolverFailedError",
    "TooLargeError",
    "ValidationError",
    "derive_rng",
    "derive_seed",
    "dumps_json",
    "export_csv_to_path",
    "export_json_to_path",
    "get_logger",
]
