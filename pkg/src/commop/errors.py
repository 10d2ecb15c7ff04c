"""Exception types shared across the package."""


class CommopError(Exception):
    """Base class for all library errors."""


class DivisionByZero(CommopError, ZeroDivisionError):
    pass


class IndexMismatch(CommopError, ValueError):
    pass


class InvalidIndex(CommopError, ValueError):
    pass


class InsufficientPrecision(CommopError):
    pass


class MissingRootIndex(CommopError, IndexError):
    """A_i or zeta used without a configured k."""


class ContainsB(CommopError, ValueError):
    pass


class NotNormalized(CommopError, ValueError):
    pass


class NotTotallyFree(CommopError, ValueError):
    pass


class GammaPresent(CommopError, ValueError):
    pass


class NotCoprime(CommopError, ValueError):
    pass


class NotCentral(CommopError, ValueError):
    pass


class NotMonic(CommopError, ValueError):
    pass


class NonCommuting(CommopError):
    """Raised when a normal form cannot lie in the centralizer of d^q.

    ``order`` is the offending order.  ``reason`` is ``"noncommuting"`` for a
    nonzero component below -q+1, ``"not-central"`` for an exact component
    that fails to commute with d^q, or ``"precision"``.
    """

    def __init__(self, message, order=None, reason="noncommuting"):
        super().__init__(message)
        self.order = order
        self.reason = reason
