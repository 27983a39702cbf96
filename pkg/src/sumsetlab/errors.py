"""Exception hierarchy shared by every sumsetlab module."""


class SumsetLabError(Exception):
    """Base class for all library errors."""


class ElementOutOfRange(SumsetLabError, ValueError):
    pass


class BadUniverse(SumsetLabError, ValueError):
    pass


class IntervalOutOfRange(SumsetLabError, ValueError):
    pass


class BadQuery(SumsetLabError, ValueError):
    pass


class TooLarge(SumsetLabError):
    """Raised when an exhaustive enumeration would exceed the configured guard."""


class ZeroSamples(SumsetLabError, ValueError):
    pass


class DegenerateDenominator(SumsetLabError, ArithmeticError):
    pass


class Overflow(SumsetLabError, OverflowError):
    pass
