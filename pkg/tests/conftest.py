"""Shared pytest fixtures: seeded generators and a small two-bidder instance."""

from __future__ import annotations

from pathlib import Path
from typing import Iterator

import numpy as np
import pytest

from config import clear_env_cache
from distributions import DiscreteDist, ProductDist
from linalg import ArchetypeMatrix
from mechanisms import ValuationSpec


@pytest.fixture(autouse=True)
def _fresh_env_cache() -> Iterator[None]:
    """Validated env values are cached; every test starts from a clean cache."""
    clear_env_cache()
    yield
    clear_env_cache()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def toy_matrix() -> ArchetypeMatrix:
    """2 × 2 nonnegative archetypes with rows summing to 1."""
    return ArchetypeMatrix([[0.6, 0.4], [0.3, 0.7]])


@pytest.fixture
def gaussian_matrix() -> np.ndarray:
    """Tall Gaussian matrix, full column rank with probability 1."""
    return np.random.default_rng(7).standard_normal((60, 3))


@pytest.fixture
def toy_vals(toy_matrix: ArchetypeMatrix) -> ValuationSpec:
    """Additive valuations over 2 items through the toy archetypes."""
    return ValuationSpec("additive", 2, toy_matrix)


@pytest.fixture
def toy_dists() -> list[DiscreteDist]:
    """Two bidders, two latent atoms each."""
    return [
        DiscreteDist(support=np.array([[0.2, 0.3], [0.8, 0.6]]), probs=np.array([0.5, 0.5])),
        DiscreteDist(support=np.array([[0.1, 0.9], [0.7, 0.2]]), probs=np.array([0.4, 0.6])),
    ]


@pytest.fixture
def toy_product(toy_dists: list[DiscreteDist]) -> ProductDist:
    return ProductDist.of(toy_dists)


@pytest.fixture
def scenarios_dir() -> Path:
    """Path to the predefined scenarios directory (src/config/scenarios)."""
    return Path(__file__).resolve().parent.parent / "src" / "config" / "scenarios"
