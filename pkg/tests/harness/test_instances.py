"""Tests for harness.generators."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from distributions import DiscreteDist, prokhorov_distance
from harness import gen_archetypes, gen_latent_dist, gen_perturbed_dist
from linalg import save_matrix, sigma_min_p
from utils import ShapeMismatchError, ValidationError


@pytest.mark.parametrize("family", ["gaussian", "orthonormal", "near_singular", "nonnegative"])
def test_families_have_requested_shape(family: str, rng: np.random.Generator) -> None:
    A = gen_archetypes(family, 40, 3, rng)
    assert A.shape == (40, 3)
    assert np.linalg.matrix_rank(A) == 3


def test_orthonormal_and_near_singular(rng: np.random.Generator) -> None:
    Q = gen_archetypes("orthonormal", 30, 4, rng)
    np.testing.assert_allclose(Q.T @ Q, np.eye(4), atol=1e-10)
    N = gen_archetypes("near_singular", 30, 4, rng)
    assert sigma_min_p(N, 2).value == pytest.approx(1e-3, rel=1e-6)


def test_nonnegative_rows_sum_to_one(rng: np.random.Generator) -> None:
    A = gen_archetypes("nonnegative", 10, 3, rng)
    assert np.all(A >= 0.0)
    np.testing.assert_allclose(A.sum(axis=1), 1.0)


def test_from_file(tmp_path: Path, rng: np.random.Generator) -> None:
    path = save_matrix(np.eye(3)[:, :2], tmp_path / "A.csv")
    np.testing.assert_array_equal(gen_archetypes("from_file", 3, 2, rng, path), np.eye(3)[:, :2])
    with pytest.raises(ShapeMismatchError):
        gen_archetypes("from_file", 4, 2, rng, path)
    with pytest.raises(ValidationError):
        gen_archetypes("from_file", 3, 2, rng)


def test_family_and_shape_checks(rng: np.random.Generator) -> None:
    with pytest.raises(ValidationError, match="Unknown archetype family"):
        gen_archetypes("sparse", 4, 2, rng)
    with pytest.raises(ValidationError):
        gen_archetypes("gaussian", 2, 3, rng)


def test_latent_dist(rng: np.random.Generator) -> None:
    D = gen_latent_dist(3, 6, rng)
    assert D.k == 3
    assert D.size == 6
    assert np.all((D.support >= 0.0) & (D.support <= 1.0))
    with pytest.raises(ValidationError):
        gen_latent_dist(3, 0, rng)


class TestPerturbedDist:
    @pytest.mark.parametrize("p", [1, 2, "inf"])
    def test_certificate_bounds_prokhorov(self, p: object, rng: np.random.Generator) -> None:
        base = gen_latent_dist(2, 4, rng)
        pert = gen_perturbed_dist(base, 0.1, p, rng)
        assert pert.certificate <= 0.1 + 1e-12
        np.testing.assert_allclose(pert.coupling.sum(axis=1), pert.dist.probs, atol=1e-12)
        np.testing.assert_allclose(pert.coupling.sum(axis=0), base.probs, atol=1e-9)
        assert prokhorov_distance(pert.dist, base, p) <= 0.1 + 1e-4

    def test_zero_radius_returns_base(self, toy_dists: list[DiscreteDist]) -> None:
        pert = gen_perturbed_dist(toy_dists[0], 0.0, 2, np.random.default_rng(0))
        assert pert.dist is toy_dists[0]
        assert pert.certificate == 0.0

    def test_radius_range(self, toy_dists: list[DiscreteDist], rng: np.random.Generator) -> None:
        with pytest.raises(ValidationError):
            gen_perturbed_dist(toy_dists[0], 1.0, 2, rng)
