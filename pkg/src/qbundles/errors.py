"""Exception types raised by qbundles constructions."""


class QBundleError(ValueError):
    """Base class for all construction errors."""


class DimensionMismatch(QBundleError):
    pass


class NotInvertible(QBundleError):
    pass


class NotAnIdeal(QBundleError):
    pass


class NotACovering(QBundleError):
    pass


class NotASubmodule(QBundleError):
    pass


class HypothesisError(QBundleError):
    """A precondition of a construction (faithfulness, group axioms, ...) fails."""


class InvalidData(QBundleError):
    """Input data violates the invariants its type requires."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class GluingError(QBundleError):
    def __init__(self, message, pairs=()):
        super().__init__(message)
        self.pairs = list(pairs)


class IncompatibleConnections(QBundleError):
    """Local connections disagree on an overlap.

    ``pair`` is the offending ``(i, j)`` and ``residual`` the difference
    of the two induced operators on the overlap.
    """

    def __init__(self, message, pair, residual):
        super().__init__(message)
        self.pair = pair
        self.residual = residual
