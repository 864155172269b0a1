"""Exception hierarchy shared by every module.

Domain errors are ``ValueError`` subclasses (bad inputs); numerical failures
are ``ArithmeticError`` subclasses (the inputs were fine, the computation
did not get there).
"""


class ErasureCostError(Exception):
    """Base class for all package errors."""


class DomainError(ErasureCostError, ValueError):
    """An argument lies outside the domain of the operation."""


class NonpositiveTemperature(DomainError):
    pass


class InfeasibleTarget(DomainError):
    """Expectation targets are on or outside the hull of the eigenvalue tuples."""


class ChainTooLong(DomainError):
    """The memory-ancilla chain is longer than the bath can couple to."""


class NumericalError(ErasureCostError, ArithmeticError):
    """Base class for numerical failures."""


class NoConvergence(NumericalError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ToleranceNotMet(NumericalError):
    def __init__(self, message, error_estimate=None):
        super().__init__(message)
        self.error_estimate = error_estimate


class StopRuleUnreachable(NumericalError):
    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved
