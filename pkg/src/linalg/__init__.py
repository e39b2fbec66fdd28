"""Dense linear algebra: norms, sigma_min,p, sampling scores and sketches."""

from linalg.archetype import ArchetypeMatrix
from linalg.matrix import (
    as_matrix,
    as_vector,
    numerical_rank,
    orthonormal_basis,
    require_full_column_rank,
)
from linalg.matrix_io import load_matrix, save_matrix
from linalg.norms import (
    NormIndex,
    dual_root_k,
    format_norm_index,
    lp_norm,
    lp_norm_rows,
    normalize_norm_index,
    root_k,
)
from linalg.scores import ScoreVector, leverage_scores, lewis_weights, sampling_probabilities
from linalg.sigma_min import SigmaMinP, sigma_min_p
from linalg.sketch import SamplePlan, apply_plan, build_sample_plan, full_plan, probability_hash

__all__ = [
    "ArchetypeMatrix",
    "NormIndex",
    "SamplePlan",
    "ScoreVector",
    "SigmaMinP",
    "apply_plan",
    "as_matrix",
    "as_vector",
    "build_sample_plan",
    "dual_root_k",
    "format_norm_index",
    "full_plan",
    "leverage_scores",
    "lewis_weights",
    "load_matrix",
    "lp_norm",
    "lp_norm_rows",
    "normalize_norm_index",
    "numerical_rank",
    "orthonormal_basis",
    "probability_hash",
    "require_full_column_rank",
    "root_k",
    "sampling_probabilities",
    "save_matrix",
    "sigma_min_p",
]
