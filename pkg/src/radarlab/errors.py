"""Exception hierarchy shared by every radarlab module."""


class RadarError(Exception):
    """Base class for all errors raised by radarlab."""


class DomainError(RadarError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigurationError(RadarError, ValueError):
    """A configuration or parameter set is inconsistent."""


class NumericalError(RadarError, ArithmeticError):
    """A computation produced a non-finite or otherwise unusable value."""


class InsufficientDataError(RadarError, ValueError):
    """Too few data points for the requested statistic."""


class DegenerateFitError(RadarError, ValueError):
    """The regression design has no variance in the predictor."""


class UnsupportedExponentError(DomainError):
    """A closed form was requested for an exponent it does not cover."""


class NoFiniteAsymptoteError(DomainError):
    """The growth law has no finite fixed point."""
