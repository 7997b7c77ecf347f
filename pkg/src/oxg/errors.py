"""Exception hierarchy shared by every module."""


class OxgError(Exception):
    """Base class for all package errors."""


class ParameterError(OxgError, ValueError):
    """A distribution parameter lies outside its admissible domain."""


class DomainError(OxgError, ValueError):
    """An argument (point, probability, order) lies outside the valid domain."""


class InfiniteOddsError(DomainError):
    """Baseline odds requested at or beyond the upper support bound."""


class UnsupportedError(OxgError):
    """The requested method or baseline combination is not available."""


class DataError(OxgError, ValueError):
    """Input data cannot be used (unparseable, empty, outside support)."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DegenerateDataError(DataError):
    """All observations are identical."""


class NonConvergenceError(OxgError, ArithmeticError):
    """A truncated series or iterative procedure failed its convergence test.

    ``value`` holds the best available (truncated) estimate so callers can
    inspect it or fall back to another method.
    """

    def __init__(self, message, value=float("nan"), terms=0):
        super().__init__(message)
        self.value = value
        self.terms = terms
