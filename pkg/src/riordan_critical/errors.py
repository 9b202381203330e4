"""Exception hierarchy shared by the library and the CLI.

The CLI maps :class:`ValidationError` (and its subclasses) to exit
status 2 and :class:`ConvergenceError` to exit status 3.
"""


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class SeriesError(ValidationError):
    """Illegal operation on a truncated power series."""


class RiordanError(ValidationError):
    """A matrix pair [g, f] is not a proper exponential Riordan matrix."""


class DomainError(ValidationError):
    """Argument lies outside the domain of an analytic evaluator."""


class GateError(DomainError):
    """An asymptotic approximant was asked for outside its admissible window."""


class ConvergenceError(ArithmeticError):
    """A numerical procedure failed to reach its target accuracy.

    ``diagnostics`` carries whatever partial state is useful for a report.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
