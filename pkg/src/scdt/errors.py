"""Exception types raised by the library."""


class ScdtError(ValueError):
    """Base class for all validation and domain errors."""


class ZeroMass(ScdtError):
    pass


class NonMonotoneWarp(ScdtError):
    pass


class NotADensity(ScdtError):
    pass


class DegenerateMap(ScdtError):
    pass


class DomainError(ScdtError):
    pass


class PartMismatch(ScdtError):
    """One signal has a trivial positive (or negative) part and the other does not."""


class ReferenceMismatch(ScdtError):
    pass


class DegenerateDesign(ScdtError):
    pass


class ConfigError(ScdtError):
    pass
