"""
Special non-standard exceptions raised by the pressurelab package.

Every exception carries the names of the module and operation that raised it, so that front ends can report
failures as machine-readable records. Validation errors derive from ValueError, numerical errors from
ArithmeticError.
"""

__author__ = 'pressurelab developers'


class PressureLabError(Exception):
    """
    Base class for all exceptions defined in this library.
    """

    def __init__(self, message='', *, module=None, operation=None):
        super().__init__(message)
        self.module = module
        self.operation = operation

    def to_record(self):
        """Return a JSON-ready dictionary describing the error."""
        return {
            'error': type(self).__name__,
            'module': self.module,
            'operation': self.operation,
            'message': str(self),
        }


class ValidationError(PressureLabError, ValueError):
    """
    Indicates that an input failed validation before any computation took place.
    """


class NumericalError(PressureLabError, ArithmeticError):
    """
    Indicates that a computation could not reach its numerical guarantees.
    """


class AlphabetError(ValidationError):
    """
    Indicates that a branch model has fewer than two branches, or that a symbol is outside the alphabet.
    """


class RangeError(ValidationError):
    """
    Indicates that a parameter lies outside its admissible range.
    """


class OverlapError(ValidationError):
    """
    Indicates that two branch intervals overlap, or that a branch leaves the unit interval.
    """


class DepthError(ValidationError):
    """
    Indicates that cylinder potentials of incompatible depth or alphabet were combined, or that a word is too short
    for a potential's depth.
    """


class BoundaryDepthError(DepthError):
    """
    Indicates that zero lies on the boundary of the step range for a step potential that is not constant on
    one-cylinders.
    """


class RegimeError(ValidationError):
    """
    Indicates that an operation was requested outside the regime in which it is defined.
    """


class BudgetError(ValidationError):
    """
    Indicates that an enumeration or sampling request exceeds the configured budget.
    """


class WidthError(ValidationError):
    """
    Indicates that the level range of a lattice table exceeds the configured memory cap.
    """


class ModelFileError(ValidationError):
    """
    Indicates that a model file does not follow the model file grammar.
    """


class UnknownFamily(ValidationError, KeyError):
    """
    Indicates that an example family was requested by a name that is not registered.
    """

    def __str__(self):
        return ValidationError.__str__(self)


class ConvergenceError(NumericalError):
    """
    Indicates that an iterative method failed to reach its tolerance within its iteration budget.
    """


class SingularJacobianError(NumericalError):
    """
    Indicates that the two-dimensional Newton solve and its nested fallback both failed.
    """


class PrecisionError(NumericalError):
    """
    Indicates that a word prefix is too short to pin down a point to the required precision.
    """


class EscapeFromRepellerError(NumericalError):
    """
    Indicates that an orbit of the interval map left the repeller, or came too close to a branch boundary to be
    coded reliably.
    """
