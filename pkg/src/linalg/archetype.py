"""The archetype (design) matrix with cached factorizations and scores."""

from __future__ import annotations

import threading
from functools import cached_property
from typing import Any

import numpy as np

from linalg.matrix import as_matrix, orthonormal_basis
from linalg.norms import NormIndex, normalize_norm_index
from linalg.scores import ScoreVector, leverage_scores, sampling_probabilities
from linalg.sigma_min import SigmaMinP, sigma_min_p


class ArchetypeMatrix:
    """Immutable ``d × k`` archetype matrix A.

    Columns are archetypes; a bidder type t is approximated by ``A z``. The
    orthonormal basis, leverage scores, sampling scores and sigma_min,p values
    are computed once and cached, so one instance can be shared by every
    bidder of a run. Behaves as an array through ``__array__``.
    """

    def __init__(self, data: Any) -> None:
        arr = as_matrix(data).copy()
        arr.setflags(write=False)
        self._data = arr
        self._lock = threading.Lock()
        self._sigma: dict[NormIndex, SigmaMinP] = {}
        self._sampling: dict[NormIndex, tuple[ScoreVector, int]] = {}

    @classmethod
    def wrap(cls, A: Any) -> ArchetypeMatrix:
        """Return *A* itself if it already is an ArchetypeMatrix, else wrap it."""
        return A if isinstance(A, ArchetypeMatrix) else cls(A)

    def __array__(self, dtype: Any = None, copy: Any = None) -> np.ndarray:
        if dtype is None:
            return self._data
        return self._data.astype(dtype)

    def __repr__(self) -> str:
        return f"ArchetypeMatrix(d={self.d}, k={self.k})"

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def d(self) -> int:
        return int(self._data.shape[0])

    @property
    def k(self) -> int:
        return int(self._data.shape[1])

    @cached_property
    def inf_norm(self) -> float:
        """Largest absolute entry, the ‖A‖_∞ in the Lipschitz constant k‖A‖_∞L."""
        return float(np.max(np.abs(self._data)))

    @cached_property
    def basis(self) -> np.ndarray:
        return orthonormal_basis(self._data)

    @cached_property
    def leverage(self) -> ScoreVector:
        return leverage_scores(self._data)

    def sampling_scores(self, p: int | float | str) -> tuple[ScoreVector, int]:
        """Cached :func:`linalg.scores.sampling_probabilities` for p."""
        p = normalize_norm_index(p)
        with self._lock:
            if p not in self._sampling:
                self._sampling[p] = (
                    (self.leverage, 1) if p == 2 else sampling_probabilities(self._data, p)
                )
            return self._sampling[p]

    def sigma_min(self, p: int | float | str) -> SigmaMinP:
        """Cached :func:`linalg.sigma_min.sigma_min_p` for p."""
        p = normalize_norm_index(p)
        with self._lock:
            if p not in self._sigma:
                self._sigma[p] = sigma_min_p(self._data, p)
            return self._sigma[p]
