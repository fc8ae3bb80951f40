"""Exception hierarchy shared by every module."""


class ForgeError(Exception):
    """Base class for all library errors."""


class NotIrreducible(ForgeError):
    pass


class FieldMismatch(ForgeError):
    pass


class NonUnit(ForgeError):
    pass


class PrecisionExhausted(ForgeError):
    pass


class WittOverflow(ForgeError):
    pass


class MixedRings(ForgeError):
    pass


class LengthUnderflow(ForgeError):
    pass


class NotInIdeal(ForgeError):
    pass


class InvariantViolation(ForgeError):
    pass


class NotInvertible(ForgeError):
    pass


class BudgetExceeded(ForgeError):
    pass


class NotDominant(ForgeError):
    pass


class ShapeMismatch(ForgeError):
    pass


class TypeMismatch(ForgeError):
    pass


class IncompatibleFiltrations(ForgeError):
    pass


class ParseError(ForgeError):
    pass


class UnsupportedBase(ForgeError):
    pass


class NotABundle(ForgeError):
    pass


class ParameterMismatch(ForgeError):
    pass
