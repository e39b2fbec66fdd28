"""Tests for utils.exceptions."""

from __future__ import annotations

import pytest

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


def test_archetype_lab_error_is_exception() -> None:
    err = ArchetypeLabError("msg")
    assert isinstance(err, Exception)
    assert str(err) == "msg"


def test_input_errors_are_validation_errors() -> None:
    assert issubclass(ShapeMismatchError, ValidationError)
    assert issubclass(BadProbabilitiesError, ValidationError)


def test_solver_failed_keeps_status() -> None:
    err = SolverFailedError("LP failed", status=2)
    assert err.status == 2
    assert SolverFailedError("no status").status is None


def test_no_convergence_carries_partial_result() -> None:
    err = NoConvergenceError("cap reached", residual=0.25, partial=[1.0, 2.0])
    assert err.residual == 0.25
    assert err.partial == [1.0, 2.0]


def test_catch_base_catches_all() -> None:
    for exc_cls in (
        ValidationError,
        RankDeficientError,
        SingularDesignError,
        InfeasibleError,
        TooLargeError,
        EmptyCubeError,
        PreconditionFailedError,
    ):
        with pytest.raises(ArchetypeLabError):
            raise exc_cls("test")
