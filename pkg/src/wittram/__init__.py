"""wittram: exact arithmetic for truncated Witt vectors, wildly ramified
cyclic towers over k((s)), their ramification invariants, local symbols,
and the associated graded/Chow bookkeeping."""

from .errors import (
    ConsistencyFailure,
    GhostInversionFailure,
    HasseArfViolation,
    InfeasibleProblem,
    InsufficientPrecision,
    NonTotallyRamified,
    VanishingFailure,
    WittramError,
    WittTableError,
)

__version__ = "0.1.0"

__all__ = [
    "ConsistencyFailure",
    "GhostInversionFailure",
    "HasseArfViolation",
    "InfeasibleProblem",
    "InsufficientPrecision",
    "NonTotallyRamified",
    "VanishingFailure",
    "WittramError",
    "WittTableError",
    "__version__",
]
