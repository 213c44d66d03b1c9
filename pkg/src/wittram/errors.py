"""Shared exception types.

Every "loud failure" contract in the package raises one of these rather than
returning a sentinel, so callers can distinguish precision exhaustion (retry
with a bigger window) from genuine mathematical contradictions (abort).
"""


class WittramError(Exception):
    """Base class for all package errors."""


class InsufficientPrecision(WittramError):
    """A requested quantity is not determined by the known coefficient window."""


class NonTotallyRamified(WittramError):
    """Standard-form reduction emptied the pole: the step is unramified/split."""


class HasseArfViolation(WittramError):
    """An upper-numbering break came out non-integral (upstream bug signal)."""


class ConsistencyFailure(WittramError):
    """Two independent routes to the same invariant disagree."""


class GhostInversionFailure(WittramError):
    """A division by p^j during ghost inversion was not exact."""


class VanishingFailure(WittramError):
    """A local symbol that the modulus bound forces to vanish did not."""


class WittTableError(WittramError):
    """Integrality or weight certification failed while building Witt tables."""


class InfeasibleProblem(WittramError):
    """An exhaustive lattice search found no feasible point."""
