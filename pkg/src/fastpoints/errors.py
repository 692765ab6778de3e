"""Exception hierarchy shared by all fastpoints modules."""


class FastpointsError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(FastpointsError, ValueError):
    """Invalid parameter or configuration value."""


class ResolutionError(FastpointsError, ValueError):
    """The sampling grid is too coarse for the requested level or window."""


class UnsupportedKindError(FastpointsError, TypeError):
    """Operation not defined for this kind of sample path."""


class DomainError(FastpointsError, ValueError):
    """Argument outside the domain where a formula is defined."""


class UsageError(FastpointsError, ValueError):
    """Inconsistent combination of arguments."""


class DegenerateMeasureError(FastpointsError, ValueError):
    """A discrete measure violates atom separation or normalisation."""


class FitError(FastpointsError, ValueError):
    """Not enough usable data for a regression.

    The offending ``levels`` and ``counts`` are kept on the exception so the
    caller can inspect what was available.
    """

    def __init__(self, message, levels=(), counts=()):
        super().__init__(message)
        self.levels = list(levels)
        self.counts = list(counts)
