"""Exception hierarchy shared by every module."""


class HalaszError(Exception):
    """Base class for errors raised by this package."""


class CapacityError(HalaszError, ValueError):
    """A request exceeds the range covered by the sieve tables."""


class DomainError(HalaszError, ValueError):
    """Inputs fall outside the region where a construction is defined."""


class UnitDiscError(HalaszError, ValueError):
    """A multiplicative function takes a value outside the closed unit disc."""


class CoverageError(HalaszError, ValueError):
    """A t-grid is too short or too coarse for the requested windows."""


class ResolutionError(HalaszError, ValueError):
    """A quadrature step is too coarse for the oscillation of the integrand."""


class ConfigError(HalaszError, ValueError):
    """A run configuration document is malformed."""
