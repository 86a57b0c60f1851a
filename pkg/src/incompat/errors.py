"""Exception hierarchy shared by every module."""


class IncompatError(Exception):
    """Base class for all library errors."""


class InputError(IncompatError):
    """Problems with user-supplied data (maps to CLI exit code 2)."""


class ShapeError(InputError, ValueError):
    pass


class SizeLimit(InputError, ValueError):
    pass


class NotHermitian(InputError, ValueError):
    pass


class NotTracePreserving(InputError, ValueError):
    pass


class DomainError(InputError, ValueError):
    pass


class PreconditionError(InputError, ValueError):
    pass


class ParseError(InputError):
    """Malformed device file; ``context`` names the offending field."""

    def __init__(self, message, context=None):
        self.context = context
        if context:
            message = f"{context}: {message}"
        super().__init__(message)


class ValidationError(InputError):
    """A parsed object violates an invariant.

    ``invariant`` names the violated property and ``residual`` is the size
    of the violation.
    """

    def __init__(self, invariant, residual, message=None):
        self.invariant = invariant
        self.residual = float(residual)
        self.args = (invariant, self.residual) if message is None else (invariant, self.residual, message)

    def __str__(self):
        return f"invariant '{self.invariant}' violated (residual {self.residual:.3g})"


class SolverError(IncompatError):
    """An SDP solve ended without an optimal certificate (CLI exit code 3)."""

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution
