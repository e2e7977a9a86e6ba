"""Exception hierarchy shared by every msvekit module."""


class MsveError(Exception):
    """Base class for all errors raised by msvekit."""


class ChainFormatError(MsveError, ValueError):
    """A chain file could not be parsed.

    ``line`` is the 1-based line number of the offending row when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DimensionError(MsveError, ValueError):
    """Array shapes are inconsistent (ragged rows, wrong matrix sizes)."""


class InsufficientDataError(MsveError, ValueError):
    """Too few samples for the requested statistic."""


class PreconditionError(MsveError, ValueError):
    """An argument violates a documented precondition (bad lag, b_n, level...)."""


class NumericError(MsveError, ArithmeticError):
    """Base class for numerical failures."""


class NotPositiveDefiniteError(NumericError):
    """Matrix failed a positive-definiteness requirement.

    ``pivot`` is the 1-based Cholesky pivot at which factorization broke down,
    or ``None`` when the failure was detected another way.
    """

    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot


class ConvergenceError(NumericError):
    """An iterative routine hit its iteration cap.

    ``residual`` holds the last off-diagonal norm reached.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConfigError(MsveError, ValueError):
    """Experiment configuration is invalid."""
