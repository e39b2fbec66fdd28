"""Random instances: archetype matrices, latent priors and certified perturbations."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from config import ARCHETYPE_FAMILIES
from distributions import DiscreteDist, coupling_violation
from linalg import lp_norm, load_matrix, normalize_norm_index, orthonormal_basis
from utils import ShapeMismatchError, ValidationError, get_logger

logger = get_logger(__name__)

NEAR_SINGULAR_VALUE = 1e-3


def gen_archetypes(
    family: str,
    d: int,
    k: int,
    rng: np.random.Generator,
    matrix_path: Path | None = None,
) -> np.ndarray:
    """Draw a ``d × k`` archetype matrix from a family.

    Raises:
        ValidationError: For an unknown family, k > d, or a missing path.
        ShapeMismatchError: If a loaded matrix is not ``d × k``.
    """
    if family not in ARCHETYPE_FAMILIES:
        raise ValidationError(
            f"Unknown archetype family {family!r}; choose from {ARCHETYPE_FAMILIES}"
        )
    if k < 1 or d < k:
        raise ValidationError(f"Need 1 <= k <= d, got d={d}, k={k}")
    if family == "from_file":
        if matrix_path is None:
            raise ValidationError("family 'from_file' needs a matrix path")
        A = load_matrix(Path(matrix_path))
        if A.shape != (d, k):
            raise ShapeMismatchError(f"Matrix file holds {A.shape}, scenario expects {(d, k)}")
        return A
    if family == "nonnegative":
        A = rng.uniform(0.0, 1.0, size=(d, k))
        return A / A.sum(axis=1, keepdims=True)
    G = rng.standard_normal((d, k))
    if family == "gaussian":
        return G
    Q = orthonormal_basis(G)
    if family == "orthonormal":
        return Q
    scale = np.ones(k)
    scale[-1] = NEAR_SINGULAR_VALUE
    return Q * scale


def gen_latent_dist(k: int, size: int, rng: np.random.Generator) -> DiscreteDist:
    """``size`` uniform atoms in [0,1]^k with Dirichlet(1) weights."""
    if size < 1:
        raise ValidationError(f"support size must be positive, got {size}")
    support = rng.uniform(0.0, 1.0, size=(size, k))
    return DiscreteDist.from_atoms(support, rng.dirichlet(np.ones(size)))


@dataclass(frozen=True)
class PerturbedDistribution:
    """A perturbed distribution with a Prokhorov certificate.

    Attributes:
        dist: The perturbed distribution D.
        coupling: ``|supp D| × |supp base|`` coupling of D and the base.
        certificate: Coupling mass on pairs farther than eps; ≤ eps
            certifies π_p(D, base) ≤ eps.
        eps: Perturbation radius.
    """

    dist: DiscreteDist
    coupling: np.ndarray
    certificate: float
    eps: float


def _unit_direction(k: int, p: float, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal(k)
    norm = lp_norm(g, p)
    return g / norm if norm > 0.0 else np.eye(k)[0]


def gen_perturbed_dist(
    base: DiscreteDist,
    eps: float,
    p: int | float | str,
    rng: np.random.Generator,
) -> PerturbedDistribution:
    """Move each atom's mass within an ℓp ball of radius eps, except an eps share.

    Per base atom x with mass π: mass (1 − eps)π goes to a point within ℓp
    distance eps of x (clipped to the unit cube, which never moves it
    farther), and mass eps·π goes to a uniform point of the cube.
    """
    if not 0.0 <= eps < 1.0:
        raise ValidationError(f"eps must lie in [0, 1), got {eps}")
    p = normalize_norm_index(p)
    if eps == 0.0:
        return PerturbedDistribution(
            dist=base, coupling=np.diag(base.probs.copy()), certificate=0.0, eps=0.0
        )
    points, weights, origins = [], [], []
    for i, (x, prob) in enumerate(zip(base.support, base.probs)):
        near = np.clip(x + eps * rng.uniform() * _unit_direction(base.k, p, rng), 0.0, 1.0)
        points += [near, rng.uniform(0.0, 1.0, size=base.k)]
        weights += [(1.0 - eps) * float(prob), eps * float(prob)]
        origins += [i, i]
    dist = DiscreteDist.from_atoms(points, weights)
    coupling = np.zeros((dist.size, base.size))
    for point, weight, origin in zip(points, weights, origins):
        coupling[dist.index_of(point), origin] += weight
    # Match the renormalized marginal exactly.
    coupling *= (dist.probs / coupling.sum(axis=1))[:, None]
    certificate = coupling_violation(coupling, dist, base, eps, p, atol=1e-9)
    logger.debug("Perturbed %d atoms by eps=%.4g, certificate %.4g", base.size, eps, certificate)
    return PerturbedDistribution(dist=dist, coupling=coupling, certificate=certificate, eps=eps)
