"""Exception types shared across the toolkit."""


class ConfuseError(Exception):
    """Base class for all toolkit errors."""


class NotPrime(ConfuseError):
    def __init__(self, p):
        super().__init__(f"{p} is not prime")
        self.p = p


class SizeBoundExceeded(ConfuseError):
    pass


class DivisionByZero(ConfuseError):
    pass


class NotADivisor(ConfuseError):
    pass


class LemmaViolation(ConfuseError):
    """Projection of a unit subgroup failed to be a uniform cover.

    This is never expected for valid inputs; it indicates an implementation
    bug rather than bad data.
    """


class AlphabetTooLarge(ConfuseError):
    pass


class NotAFieldScheme(ConfuseError):
    pass


class SchemaError(ConfuseError):
    pass


class TotalityError(ConfuseError):
    pass


class LengthMismatch(ConfuseError):
    pass


class Undecodable(ConfuseError):
    pass


class BudgetExceeded(ConfuseError):
    pass


class NoExpansionFound(ConfuseError):
    pass
