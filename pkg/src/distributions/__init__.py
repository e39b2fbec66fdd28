"""Discrete latent-type distributions, grid rounding, oracles and distances."""

from distributions.discrete import DiscreteDist, load_dist, point_key, save_dist
from distributions.distances import (
    RoundedTvEstimate,
    coupling_violation,
    expected_rounded_tv,
    pairwise_distances,
    prokhorov_distance,
    support_distance_mass,
    tv_distance,
    tv_rounding_bound,
)
from distributions.oracle import (
    DistributionOracle,
    closest_support_index,
    closest_support_point,
    conditional_distribution,
    conditional_sample,
)
from distributions.product import Profile, ProductDist, with_report
from distributions.rounding import (
    GRID_SNAP,
    RoundingParams,
    cell_of,
    grid_keys,
    round_dist,
    round_point,
    values_from_keys,
)

__all__ = [
    "GRID_SNAP",
    "DiscreteDist",
    "DistributionOracle",
    "ProductDist",
    "Profile",
    "RoundedTvEstimate",
    "RoundingParams",
    "cell_of",
    "closest_support_index",
    "closest_support_point",
    "conditional_distribution",
    "conditional_sample",
    "coupling_violation",
    "expected_rounded_tv",
    "grid_keys",
    "load_dist",
    "pairwise_distances",
    "point_key",
    "prokhorov_distance",
    "round_dist",
    "round_point",
    "save_dist",
    "support_distance_mass",
    "tv_distance",
    "tv_rounding_bound",
    "values_from_keys",
    "with_report",
]
