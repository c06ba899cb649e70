"""Exception hierarchy shared by all leflab modules."""


class LeflabError(Exception):
    """Base class for every error raised by leflab."""


class NonPrimeModulus(LeflabError, ValueError):
    pass


class NotSquare(LeflabError, ValueError):
    pass


class DimensionMismatch(LeflabError, ValueError):
    pass


class ZeroAlpha(LeflabError, ZeroDivisionError):
    pass


class NonIntegralResult(LeflabError, ArithmeticError):
    """A quantity that must be an integer came out fractional (a bug)."""


class PreconditionViolated(LeflabError, ValueError):
    pass


class SingularCramerSystem(LeflabError, ArithmeticError):
    pass


class IndexOutOfRange(LeflabError, IndexError):
    pass


class ParityViolation(LeflabError, ValueError):
    pass


class ParseError(LeflabError, ValueError):
    pass


class NonArtinian(LeflabError, ValueError):
    pass


class CharacteristicObstruction(LeflabError):
    """The extension recursion is not proven for this characteristic.

    Raised when the prime divides the guard product of binomial
    determinants.  It says nothing about whether the map itself has full
    rank.
    """

    def __init__(self, p: int, product: int):
        self.p = p
        self.product = product
        super().__init__(f"characteristic {p} divides the guard product {product}")
