"""Application constants for ArchetypeLab."""

from typing import Final

APP_NAME: Final[str] = "ArchetypeLab"
APP_VERSION: Final[str] = "0.1.0"

# Error-bound constants of the query protocol, one per norm index.
ERROR_CONSTANT_L1: Final[float] = 2.5
ERROR_CONSTANT_L2: Final[float] = 7.5
# c_p = 18 * 200**(1/p) + 3 for p >= 3.
ERROR_CONSTANT_SCALE: Final[float] = 18.0
ERROR_CONSTANT_BASE: Final[float] = 200.0
ERROR_CONSTANT_SHIFT: Final[float] = 3.0

# Utilities below this magnitude are float noise, not IR or BIC violations.
AUDIT_TOLERANCE: Final[float] = 1e-12

NORM_INF: Final[str] = "inf"

ARCHETYPE_FAMILY_DESCRIPTIONS: Final[dict[str, str]] = {
    "gaussian": "i.i.d. standard normal entries",
    "orthonormal": "Q factor of a Gaussian matrix (sigma_min,2 = 1)",
    "near_singular": "orthonormal columns with the last singular value scaled to 1e-3",
    "nonnegative": "uniform [0,1] entries, rows scaled to sum 1 (types stay in [0,1]^d)",
    "from_file": "matrix loaded from a CSV or JSON file",
}
ARCHETYPE_FAMILIES: Final[tuple[str, ...]] = tuple(ARCHETYPE_FAMILY_DESCRIPTIONS.keys())

VALUATION_FAMILIES: Final[tuple[str, ...]] = ("additive", "table")

MECHANISM_KIND_DESCRIPTIONS: Final[dict[str, str]] = {
    "second_price": "single-item second price with reserve, lifted to latent space",
    "random_menu": "random serial-dictatorship menu, payments repaired to BIC/IR by LP",
}
MECHANISM_KINDS: Final[tuple[str, ...]] = tuple(MECHANISM_KIND_DESCRIPTIONS.keys())

SCENARIO_MODES: Final[tuple[str, ...]] = ("recovery", "mechanism")

LOG_LEVELS: Final[tuple[str, ...]] = (
    "DEBUG",
    "INFO",
    "WARNING",
    "ERROR",
    "CRITICAL",
)
