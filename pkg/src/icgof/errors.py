"""Exception hierarchy shared by every module."""


class IcgofError(Exception):
    """Base class for all package errors."""


class InvalidInput(IcgofError, ValueError):
    pass


class IngestError(InvalidInput):
    """A CSV table could not be parsed into a numeric matrix."""


class NotPSD(IcgofError, ArithmeticError):
    """A matrix expected to be positive semidefinite has a clearly negative eigenvalue."""


class ZeroDenominator(IcgofError, ArithmeticError):
    """A normalizing quantity of the statistic vanished (typically all-zero data)."""


class DegenerateVariance(ZeroDenominator):
    """The variance estimate is zero, so the statistic cannot be standardized."""
