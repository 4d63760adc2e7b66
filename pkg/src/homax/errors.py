"""Exception hierarchy. Every raised error names the violated precondition."""


class HomaxError(Exception):
    """Base class for all library errors."""


# -- metric space construction ------------------------------------------------

class NonSymmetric(HomaxError):
    pass


class NonZeroDiagonal(HomaxError):
    pass


class NonPositiveMass(HomaxError):
    pass


class DegenerateDistance(HomaxError):
    pass


class NonPositiveRadius(HomaxError):
    pass


# -- grids ---------------------------------------------------------------------

class InvalidScaleRatio(HomaxError):
    pass


# -- exponents and norms --------------------------------------------------------

class ExponentBelowOne(HomaxError):
    pass


class NonPositiveWeight(HomaxError):
    pass


class NegativeInput(HomaxError):
    pass


class DeltaUndefined(HomaxError):
    pass


class ZeroWeightMass(HomaxError):
    pass


class InvalidConfig(HomaxError):
    pass


# -- operators -------------------------------------------------------------------

class ArityMismatch(HomaxError):
    pass


class AllZeroInput(HomaxError):
    pass


# -- Calderon-Zygmund decomposition ----------------------------------------------

class HeightBelowThreshold(HomaxError):
    pass


class RatioTooSmall(HomaxError):
    pass


# -- testing conditions ------------------------------------------------------------

class SigmaUndefined(HomaxError):
    pass


class InvalidExponents(HomaxError):
    pass


# -- harness -----------------------------------------------------------------------

class ParseError(HomaxError):
    pass


class SchemaError(HomaxError):
    pass


class ValidationError(HomaxError):
    pass


class UnknownSuite(HomaxError):
    pass
