"""Tests for linalg.sigma_min."""

from __future__ import annotations

import math

import numpy as np
import pytest

from linalg.sigma_min import SigmaMinP, sigma_min_p
from utils import InfeasibleError, ValidationError


def _l1_sphere_grid_min(A: np.ndarray, steps: int = 20_001) -> float:
    """Brute-force min of ‖Ax‖₁ over the ℓ1 circle for k = 2."""
    t = np.linspace(-1.0, 1.0, steps)
    best = math.inf
    for sign in (1.0, -1.0):
        x = np.stack([t, sign * (1.0 - np.abs(t))], axis=1)
        best = min(best, float(np.min(np.abs(x @ A.T).sum(axis=1))))
    return best


class TestCertifiedMethods:
    def test_l1_diagonal(self) -> None:
        result = sigma_min_p(np.diag([2.0, 3.0]), 1)
        assert result.method == "orthant_lp"
        assert result.certified
        assert result.value == pytest.approx(2.0, abs=1e-9)

    def test_l2_is_smallest_singular_value(self, gaussian_matrix: np.ndarray) -> None:
        result = sigma_min_p(gaussian_matrix, 2)
        assert result.method == "svd"
        assert result.value == pytest.approx(np.linalg.svd(gaussian_matrix, compute_uv=False)[-1])

    def test_identity_l2(self) -> None:
        assert sigma_min_p(np.eye(4), 2).value == pytest.approx(1.0)

    def test_l1_matches_brute_force(self) -> None:
        A = np.random.default_rng(5).standard_normal((40, 2))
        exact = sigma_min_p(A, 1).value
        grid = _l1_sphere_grid_min(A)
        assert exact <= grid + 1e-9
        assert exact >= grid - 1e-3 * np.abs(A).sum()

    def test_orthant_cap(self) -> None:
        A = np.random.default_rng(0).standard_normal((10, 4))
        with pytest.raises(InfeasibleError, match="exceeds the cap"):
            sigma_min_p(A, 1, max_orthant_k=3)


class TestSphereSearch:
    def test_inf_diagonal(self) -> None:
        result = sigma_min_p(np.diag([2.0, 0.5]), "inf")
        assert result.method == "sphere_search"
        assert not result.certified
        assert result.value == pytest.approx(0.5, abs=1e-8)

    def test_p3_bounded_by_random_points(self) -> None:
        A = np.random.default_rng(9).standard_normal((30, 3))
        value = sigma_min_p(A, 3).value
        xs = np.random.default_rng(1).standard_normal((2000, 3))
        ratios = np.linalg.norm(xs @ A.T, ord=3, axis=1) / np.linalg.norm(xs, ord=3, axis=1)
        assert value <= ratios.min() + 1e-9
        assert value > 0.0

    def test_default_rng_is_deterministic(self, gaussian_matrix: np.ndarray) -> None:
        assert sigma_min_p(gaussian_matrix, 4).value == sigma_min_p(gaussian_matrix, 4).value


@pytest.mark.parametrize("p", [1, 2, 3, "inf"])
@pytest.mark.parametrize("c", [3.0, -0.5])
def test_homogeneous_in_scale(p: object, c: float) -> None:
    A = np.array([[1.0, 0.2], [0.3, 2.0], [-1.0, 0.5]])
    base = sigma_min_p(A, p).value
    assert sigma_min_p(c * A, p).value == pytest.approx(abs(c) * base, rel=1e-6)


def test_zero_matrix_rejected() -> None:
    with pytest.raises(ValidationError, match="zero matrix"):
        sigma_min_p(np.zeros((3, 2)), 2)


def test_result_validation() -> None:
    with pytest.raises(ValidationError):
        SigmaMinP(p=3, value=1.0, method="sphere_search", certified=True)
    with pytest.raises(ValidationError):
        SigmaMinP(p=2, value=-1.0, method="svd", certified=True)
    assert SigmaMinP(p=math.inf, value=0.5, method="sphere_search", certified=False).to_dict() == {
        "p": "inf",
        "value": 0.5,
        "method": "sphere_search",
        "certified": False,
    }
