"""Exception types shared across the package."""


class DonsaError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(DonsaError, ValueError):
    pass


class DegenerateGeometry(DonsaError, ValueError):
    """Two nodes share a position, so path loss is undefined."""


class EmptyProblem(DonsaError):
    """No sources or no assignable columns; callers report all-unmatched."""


class SearchSpaceTooLarge(DonsaError):
    pass


class UnknownRf(DonsaError, KeyError):
    pass


class InsufficientSamples(DonsaError, ValueError):
    pass


class ConfigError(DonsaError, ValueError):
    pass
