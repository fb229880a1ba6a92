"""Exception types raised across the package."""


class GeodesicError(Exception):
    """Base class for all errors raised by closedgeo."""


class NonHyperbolic(GeodesicError):
    pass


class RelatorNotFound(GeodesicError):
    pass


class IdentityWord(GeodesicError):
    pass


class CapacityExceeded(GeodesicError):
    pass


class InvariantClash(GeodesicError):
    pass


class FormatVersionMismatch(GeodesicError):
    pass


class CorruptRow(GeodesicError):
    def __init__(self, line, reason):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class NonPositiveNorm(GeodesicError):
    pass


class InsufficientData(GeodesicError):
    pass


class DivergentRegion(GeodesicError):
    pass


class DegenerateSample(GeodesicError):
    pass
