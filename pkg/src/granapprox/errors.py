"""Exception hierarchy shared across the package."""


class GranapproxError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(GranapproxError, ValueError):
    """Input violates a contract (domain, shape, alignment, relation properties)."""


class RelationError(ValidationError):
    """A fuzzy relation fails a required property.

    Carries the offending triples or pairs in ``violations``.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class ParseError(GranapproxError, ValueError):
    """Malformed input file (CSV or JSON)."""


class SolverError(GranapproxError, RuntimeError):
    """A solver failed to produce a result."""


class NegativeCycleError(SolverError):
    """A negative-cost cycle was found in a residual network.

    This signals a solver bug, never a property of valid input.
    """

    def __init__(self, message, cycle=()):
        super().__init__(message)
        self.cycle = list(cycle)


class IterationLimitError(SolverError):
    """An iterative solver exceeded its iteration cap."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
