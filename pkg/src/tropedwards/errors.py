"""Exception hierarchy shared by every module.

The CLI maps each family onto an exit code, so new errors should subclass
one of :class:`PrecisionError`, :class:`RefusedInput` or :class:`ParseError`.
"""


class TropEdwardsError(Exception):
    """Base class for all library errors."""


class PrecisionError(TropEdwardsError):
    """A truncated computation cannot decide the requested quantity."""


class InsufficientPrecision(PrecisionError):
    pass


class UnknownCoefficientValuation(PrecisionError):
    """A coefficient valuation is only bounded below and the bound does not decide."""


class UnderdeterminedFit(PrecisionError):
    pass


class RefusedInput(TropEdwardsError):
    """Mathematically degenerate or out-of-scope input."""


class NotASquare(RefusedInput):
    pass


class DegenerateParams(RefusedInput):
    pass


class UndefinedDelta(RefusedInput):
    pass


class PolarPoint(RefusedInput):
    pass


class ExceptionalParameter(RefusedInput):
    pass


class NoCycle(RefusedInput):
    pass


class NotSmooth(RefusedInput):
    pass


class OffsetMismatch(RefusedInput):
    pass


class IncompleteFundamentalDomain(RefusedInput):
    pass


class DisagreementBug(TropEdwardsError):
    """Two independent checks disagree: an implementation fault, never a legal state."""


class ParseError(TropEdwardsError):
    def __init__(self, message, text="", position=0):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position
