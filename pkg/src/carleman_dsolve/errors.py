"""Exception and warning types raised by the library."""


class CarlemanError(Exception):
    """Base class for all library errors."""


class DomainError(CarlemanError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class InvalidInputError(CarlemanError, ValueError):
    """Structurally invalid input (empty sequences, bad shapes, ...)."""


class InvalidParamsError(CarlemanError, ValueError):
    """Numerical parameters violate a documented constraint."""


class UnsupportedProblemError(CarlemanError, ValueError):
    """The problem is well formed but outside the supported class (q <= 2)."""


class ValidationError(CarlemanError):
    """A difference problem failed its hard validation checks."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConvergenceError(CarlemanError, RuntimeError):
    """Series summation hit its level cap before the stopping rule fired."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace if trace is not None else []


class CacheBudgetError(CarlemanError, RuntimeError):
    """The recurrence memo cache exceeded its configured entry budget."""


class NoSolutionError(CarlemanError, ArithmeticError):
    """The constant-coefficient symbol vanishes at the requested frequency."""


class UnderflowError(CarlemanError, ArithmeticError):
    """A magnitude underflowed and no log-space evaluator was available."""


class AccuracyWarning(UserWarning):
    """A construction could not reach the requested accuracy."""


class ExpensiveComputationWarning(UserWarning):
    """Parameters imply a very deep recurrence."""


class GrowthConditionWarning(UserWarning):
    """The sampled growth condition looks unbounded on the sample grid."""
