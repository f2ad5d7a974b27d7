"""Exception hierarchy shared by all modstand modules."""


class ModstandError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(ModstandError):
    pass


class NotComplexLinear(ModstandError):
    pass


class NotAntilinear(ModstandError):
    pass


class Singular(ModstandError):
    pass


class NotPositive(ModstandError):
    pass


class NotIsometric(ModstandError):
    pass


class NotStandard(ModstandError):
    pass


class ModularRelationViolated(ModstandError):
    pass


class NormBoundViolated(ModstandError):
    pass


class ConjugationMismatch(ModstandError):
    pass


class NotContained(ModstandError):
    pass


class InvalidRep(ModstandError):
    pass


class NotIrreducible(ModstandError):
    pass


class DimensionOverflow(ModstandError):
    pass


class NotCyclicSeparating(ModstandError):
    pass


class NotInvertible(ModstandError):
    pass


class NotSubalgebra(ModstandError):
    pass


class InvalidGrid(ModstandError):
    pass


class NotBuilt(ModstandError):
    pass


class NotDecaying(ModstandError):
    pass


class NotConverged(ModstandError):
    pass


class InvalidParameters(ModstandError):
    pass


class EmptyRegion(ModstandError):
    pass


class NotProper(ModstandError):
    pass


class UsageError(ModstandError):
    pass


class IoError(ModstandError):
    pass
