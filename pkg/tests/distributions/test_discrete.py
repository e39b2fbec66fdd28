"""Tests for distributions.discrete."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from distributions import DiscreteDist, load_dist, save_dist
from utils import BadProbabilitiesError, ShapeMismatchError, ValidationError


class TestValidation:
    def test_valid(self, toy_dists: list[DiscreteDist]) -> None:
        D = toy_dists[1]
        assert D.k == 2
        assert D.size == 2
        with pytest.raises(ValueError):
            D.probs[0] = 0.9

    @pytest.mark.parametrize(
        "support, probs, error",
        [
            ([[0.1], [0.1]], [0.5, 0.5], ValidationError),
            ([[0.1], [1.2]], [0.5, 0.5], ValidationError),
            ([[0.1], [0.2]], [0.5, 0.4], BadProbabilitiesError),
            ([[0.1], [0.2]], [1.0, 0.0], BadProbabilitiesError),
            ([[0.1], [0.2]], [1.0], ShapeMismatchError),
            ([0.1, 0.2], [0.5, 0.5], ShapeMismatchError),
        ],
    )
    def test_rejections(self, support: list, probs: list, error: type[Exception]) -> None:
        with pytest.raises(error):
            DiscreteDist(support=np.array(support), probs=np.array(probs))


def test_from_atoms_merges_duplicates() -> None:
    D = DiscreteDist.from_atoms([[0.1, 0.2], [0.5, 0.5], [0.1, 0.2], [0.9, 0.9]], [1, 2, 1, 0])
    assert D.size == 2
    np.testing.assert_array_equal(D.support, [[0.1, 0.2], [0.5, 0.5]])
    np.testing.assert_allclose(D.probs, [0.5, 0.5])
    assert D.probs.sum() == 1.0


def test_from_atoms_rejects_negative_weights() -> None:
    with pytest.raises(BadProbabilitiesError):
        DiscreteDist.from_atoms([[0.1]], [-1.0])
    with pytest.raises(BadProbabilitiesError, match="no mass"):
        DiscreteDist.from_atoms([[0.1]], [0.0])


def test_index_of(toy_dists: list[DiscreteDist]) -> None:
    D = toy_dists[0]
    assert D.index_of([0.8, 0.6]) == 1
    assert D.index_of([0.8, 0.61]) is None


def test_pushforward_merges_images(toy_dists: list[DiscreteDist]) -> None:
    D = toy_dists[1].pushforward(lambda x: np.array([0.5, 0.5]))
    assert D.size == 1
    assert D.probs[0] == 1.0


def test_sampling_frequencies(toy_dists: list[DiscreteDist]) -> None:
    idx = toy_dists[1].sample_indices(np.random.default_rng(0), 20_000)
    assert np.mean(idx == 1) == pytest.approx(0.6, abs=0.02)
    assert toy_dists[1].sample(np.random.default_rng(0)).shape == (2,)


def test_point_mass() -> None:
    D = DiscreteDist.point_mass([0.3, 0.4])
    assert D.size == 1 and D.k == 2


def test_file_round_trip(tmp_path: Path, toy_dists: list[DiscreteDist]) -> None:
    path = save_dist(toy_dists[1], tmp_path / "D.json")
    loaded = load_dist(path)
    np.testing.assert_array_equal(loaded.support, toy_dists[1].support)
    np.testing.assert_array_equal(loaded.probs, toy_dists[1].probs)


def test_load_malformed(tmp_path: Path) -> None:
    path = tmp_path / "D.json"
    path.write_text('{"support": [[0.1]]}')
    with pytest.raises(ValidationError, match="Malformed"):
        load_dist(path)


def test_declared_dimension_checked() -> None:
    with pytest.raises(ShapeMismatchError):
        DiscreteDist.from_dict({"k": 3, "support": [[0.1, 0.2]], "probs": [1.0]})
