"""Exception hierarchy shared by every module."""


class SimRankError(Exception):
    """Base class for all library errors."""


class InputError(SimRankError, ValueError):
    """Malformed or out-of-range input (dimensions, vertex ids)."""


class ConfigError(SimRankError, ValueError):
    """Invalid parameter value, e.g. a decay constant outside (0, 1)."""


class ParseError(InputError):
    """A graph file line could not be parsed."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class UnsupportedFormatError(InputError):
    """Matrix Market variant that cannot describe a graph."""


class ConvergenceError(SimRankError):
    """GMRES did not reach the requested tolerance.

    The best iterate found is kept on ``estimate`` so callers can still
    persist it.
    """

    def __init__(self, message, residual_history, estimate=None):
        super().__init__(message)
        self.residual_history = residual_history
        self.estimate = estimate


class NumericalBreakdownError(SimRankError, ArithmeticError):
    """A NaN or Inf appeared in the iterates."""


class ResourceError(SimRankError):
    """A configured size cap was exceeded."""

    def __init__(self, message, limit=None, value=None):
        super().__init__(message)
        self.limit = limit
        self.value = value


class VertexError(InputError):
    """A query vertex outside ``[0, n)``."""
