"""Sketched regression and success-probability boosting.

``sketched_solve`` reads the target vector only at the rows of a sample plan.
``boosted_solve`` runs several independent sketched solves and keeps the
candidate with the smallest loss on one more, independent, sketch.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from linalg import (
    NormIndex,
    SamplePlan,
    apply_plan,
    as_matrix,
    build_sample_plan,
    lp_norm,
    normalize_norm_index,
    sampling_probabilities,
)
from regression.solvers import RegressionSolution, solve_regression
from utils import RankDeficientError, ValidationError, get_logger

logger = get_logger(__name__)

EntryAccess = Callable[[int], float]
"""Entry oracle: row index -> observed value. Must be safe to call from several threads."""


@dataclass
class BoostedSolution(RegressionSolution):
    """Selected candidate of :func:`boosted_solve` plus selection metadata.

    Attributes:
        candidate_losses: Loss of every candidate on the selection sketch
            (``inf`` for candidates whose sketch was rank deficient).
        selected: Index of the returned candidate.
        queries_requested: Entry requests issued, ``(reps + 1) * s``.
    """

    candidate_losses: list[float] = field(default_factory=list)
    selected: int = 0
    queries_requested: int = 0


def _sampled_values(t_access: EntryAccess, plan: SamplePlan) -> np.ndarray:
    """Query each distinct planned row once and expand to plan order."""
    values = {int(j): float(t_access(int(j))) for j in plan.distinct}
    return np.array([values[int(j)] for j in plan.indices], dtype=float)


def sketched_solve(
    A: Any,
    t_access: EntryAccess,
    p: int | float | str,
    plan: SamplePlan,
) -> RegressionSolution:
    """Solve min ‖D S A z - D S t‖_p using only the planned entries of t.

    Raises:
        ValidationError: If ``plan.p`` differs from p.
        RankDeficientError: If the sketched matrix is rank deficient.
    """
    p = normalize_norm_index(p)
    if plan.p != p:
        raise ValidationError(f"Plan was built for p={plan.p}, solve requested p={p}")
    arr = as_matrix(A)
    sa = apply_plan(plan, arr)
    sb = plan.rescale * _sampled_values(t_access, plan)
    return solve_regression(sa, sb, p)


def _sketch_loss(
    arr: np.ndarray, t_access: EntryAccess, plan: SamplePlan, z: np.ndarray, p: NormIndex
) -> float:
    residual = apply_plan(plan, arr) @ z - plan.rescale * _sampled_values(t_access, plan)
    return lp_norm(residual, p)


def boosted_solve(
    A: Any,
    t_access: EntryAccess,
    p: int | float | str,
    s_p: int,
    reps: int,
    rng: np.random.Generator,
    *,
    probabilities: np.ndarray | None = None,
    max_workers: int = 1,
) -> BoostedSolution:
    """Boost a constant-probability sketched solve to high probability.

    All ``reps + 1`` plans are drawn from *rng* up front, in order, so the
    result does not depend on *max_workers*.

    Args:
        A: ``d × k`` archetype matrix.
        t_access: Thread-safe entry oracle.
        p: Norm index.
        s_p: Rows per sketch.
        reps: Independent candidate solves (>= 1).
        rng: Generator owned by the caller.
        probabilities: Row-sampling distribution (default: normalized
            leverage scores or Lewis weights of A).
        max_workers: Threads used to solve the candidates.

    Raises:
        ValidationError: If reps < 1.
        RankDeficientError: If every candidate sketch is rank deficient.
    """
    p = normalize_norm_index(p)
    if reps < 1:
        raise ValidationError(f"reps must be >= 1, got {reps}")
    arr = as_matrix(A)
    if probabilities is None:
        probabilities = sampling_probabilities(arr, p)[0].probabilities

    plans = [build_sample_plan(probabilities, s_p, p, rng) for _ in range(reps + 1)]
    candidate_plans, selection_plan = plans[:reps], plans[reps]

    def _solve(plan: SamplePlan) -> RegressionSolution | None:
        try:
            return sketched_solve(arr, t_access, p, plan)
        except RankDeficientError as exc:
            logger.warning("Candidate sketch skipped: %s", exc)
            return None

    if max_workers > 1 and reps > 1:
        with ThreadPoolExecutor(
            max_workers=min(max_workers, reps), thread_name_prefix="sketch"
        ) as pool:
            candidates = list(pool.map(_solve, candidate_plans))
    else:
        candidates = [_solve(plan) for plan in candidate_plans]

    if all(c is None for c in candidates):
        raise RankDeficientError(f"All {reps} candidate sketches were rank deficient")

    losses = [
        np.inf if c is None else _sketch_loss(arr, t_access, selection_plan, c.z, p)
        for c in candidates
    ]
    selected = int(np.argmin(losses))
    best = candidates[selected]
    assert best is not None
    logger.debug(
        "Boosted solve p=%s: %d candidates, selected %d (selection loss %.6g)",
        p,
        reps,
        selected,
        losses[selected],
    )
    return BoostedSolution(
        z=best.z,
        loss=best.loss,
        iterations=best.iterations,
        converged=best.converged,
        p=p,
        method=best.method,
        candidate_losses=[float(v) for v in losses],
        selected=selected,
        queries_requested=(reps + 1) * int(s_p),
    )
