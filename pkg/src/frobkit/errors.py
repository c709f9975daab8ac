"""Exception hierarchy shared by every engine."""


class FrobkitError(Exception):
    """Base class; the CLI maps these to exit code 2 unless noted."""


class NonPrime(FrobkitError, ValueError):
    pass


class NotEisenstein(FrobkitError, ValueError):
    pass


class PrecisionZero(FrobkitError, ArithmeticError):
    """An operation needed a non-zero element but got one that is zero at precision."""


class PrecisionLoss(FrobkitError, ArithmeticError):
    pass


class NotSubfield(FrobkitError, ValueError):
    pass


class NotInSubfield(FrobkitError, ValueError):
    """An element (or coefficient) does not lie in the requested subfield."""


class NormNotOne(FrobkitError, ValueError):
    pass


class NoWitness(FrobkitError, ArithmeticError):
    pass


class Inconsistent(FrobkitError, ArithmeticError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class RingMismatch(FrobkitError, ValueError):
    pass


class InvarianceFailure(FrobkitError, ArithmeticError):
    pass


class InseparableSlopes(FrobkitError, ArithmeticError):
    pass


class FactorInconsistency(FrobkitError, ArithmeticError):
    pass


class BudgetExceeded(FrobkitError, ArithmeticError):
    pass


class EigenvalueNotInK(FrobkitError, ValueError):
    pass


class Obstructed(FrobkitError):
    """A descent is impossible; carries the valuation data explaining why.

    The CLI maps this to exit code 1 (mathematical obstruction), not 2.
    """

    def __init__(self, message, data=None):
        super().__init__(message)
        self.data = dict(data or {})


class SlopeZeroNotSimple(FrobkitError, ValueError):
    pass


class CharPolyNotRational(FrobkitError, ValueError):
    pass


class EndTooBig(FrobkitError, ValueError):
    pass


class NotAntisymmetricSlopes(FrobkitError, ValueError):
    pass


class BoundViolation(FrobkitError, ValueError):
    def __init__(self, message, data=None):
        super().__init__(message)
        self.data = dict(data or {})


class NotIsomorphicToTwist(FrobkitError, ValueError):
    pass


class NotADatum(FrobkitError, ValueError):
    pass


class NegativeSlope(FrobkitError, ValueError):
    pass


class SlopeAboveOne(FrobkitError, ValueError):
    pass


class MalformedPolynomial(FrobkitError, ValueError):
    pass


class NonIntegralInput(FrobkitError, ValueError):
    pass


class ExpressionSyntaxError(FrobkitError, SyntaxError):
    """Parse failure in an element expression; ``offset`` is a 0-based byte offset."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset
