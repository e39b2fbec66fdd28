"""ℓp regression solvers, sketched solves and the latent-type query protocol."""

from regression.protocol import (
    LinfDiagnostic,
    ProtocolConfig,
    RecoveryResult,
    TypeOracle,
    error_constant,
    exact_norm_vector,
    linf_diagnostic,
    make_type_oracle,
    recover_bidders,
    recover_latent,
    recovery_error_bound,
    sample_complexity,
)
from regression.sketched import BoostedSolution, EntryAccess, boosted_solve, sketched_solve
from regression.solvers import (
    RegressionSolution,
    solve_l1,
    solve_l2,
    solve_lp,
    solve_regression,
    stationarity_residual,
)

__all__ = [
    "BoostedSolution",
    "EntryAccess",
    "LinfDiagnostic",
    "ProtocolConfig",
    "RecoveryResult",
    "RegressionSolution",
    "TypeOracle",
    "boosted_solve",
    "error_constant",
    "exact_norm_vector",
    "linf_diagnostic",
    "make_type_oracle",
    "recover_bidders",
    "recover_latent",
    "recovery_error_bound",
    "sample_complexity",
    "sketched_solve",
    "solve_l1",
    "solve_l2",
    "solve_lp",
    "solve_regression",
    "stationarity_residual",
]
