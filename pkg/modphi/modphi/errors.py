"""
errors
"""


class ModPhiError(Exception):
    """Base class of every error raised by this package."""


class ValidationError(ModPhiError, ValueError):
    """A precondition of an operation is violated by its input."""


class NumericalError(ModPhiError, ArithmeticError):
    """A numerical procedure failed on otherwise valid input."""


class OutOfRange(ValidationError):
    def __init__(self, message: str, index: int | None = None):
        """
        Keyword Arguments:
            index (int|None): Position of the offending element for grid operations.
        """
        if index is not None:
            message = f"element {index}: {message}"
        super().__init__(message)
        self.index = index


class NotLattice(ValidationError):
    pass


class IsLattice(ValidationError):
    pass


class NotAdmissible(ValidationError):
    pass


class UnsupportedOrder(ValidationError):
    pass


class TooLarge(ValidationError):
    pass


class TooManyVariables(ValidationError):
    pass


class Disconnected(ValidationError):
    pass


class DegenerateSector(ValidationError):
    pass


class BudgetExceeded(ValidationError):
    pass


class InsufficientPoints(ValidationError):
    pass


class DegenerateP(ValidationError):
    pass


class NonPositiveWeights(ValidationError):
    pass


class InvalidLaw(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class NonPositiveVariance(ValidationError):
    pass


class NotPositive(ValidationError):
    pass


class NonConvergence(NumericalError):
    pass


class ZeroAcceptance(NumericalError):
    pass


class ZeroPartitionFunction(NumericalError):
    pass
