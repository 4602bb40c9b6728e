"""Exceptions shared across the package."""


class NumericalAccuracyError(RuntimeError):
    """A computed object failed a hard numerical tolerance."""


class QuadratureTooCoarseError(NumericalAccuracyError):
    """A quadrature grid is too coarse for the requested spin length."""


class UndefinedReductionError(NumericalAccuracyError):
    """A conditional state was requested for an outcome of negligible probability."""
