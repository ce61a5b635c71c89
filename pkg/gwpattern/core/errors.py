"""Exception hierarchy shared by every gwpattern module."""

from dataclasses import dataclass


class GwPatternError(Exception):
    """Base class for all gwpattern errors."""


class ParseError(GwPatternError, ValueError):
    """Malformed distribution spec or tree text."""


class CriticalityError(GwPatternError, ValueError):
    """Offspring mean differs from 1 by more than the configured tolerance."""


class DegenerateError(GwPatternError, ValueError):
    """Offspring law with p_1 = 1 (zero variance)."""


class NotATreeError(GwPatternError, ValueError):
    """Degree sequence violates the Lukasiewicz prefix condition."""


class SpanError(GwPatternError, ValueError):
    """Requested size or walk value is unreachable because of the lattice span."""


class SizeError(GwPatternError, ValueError):
    """Tree size too small for the requested formula."""


class PreconditionError(GwPatternError, ValueError):
    """Experiment or operation precondition not met."""


class OracleCapError(GwPatternError, ValueError):
    """Brute-force oracle called beyond its hard size cap."""


class ResourceError(GwPatternError, RuntimeError):
    """Dense support would exceed the configured memory cap."""


class BudgetError(GwPatternError, RuntimeError):
    """Rejection sampler ran out of rounds."""


@dataclass(frozen=True)
class CapExceeded:
    """Returned by the unconditioned sampler when the tree outgrew its size cap."""

    size_cap: int
    reached: int
