from enum import IntEnum


class ExitCode(IntEnum):
    OK = 0,
    USAGE = 2,
    NUMERICAL = 3,
    ACCEPTANCE = 4


class ModelError(ValueError):
    pass


class ConfigurationError(ValueError):
    pass


class DocumentError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


class NumericalError(ArithmeticError):
    pass


class ResolventSingularityError(NumericalError):
    def __init__(self, message, k=None):
        super().__init__(message)
        self.k = k


class BranchAmbiguityError(NumericalError):
    pass


class ResolutionError(NumericalError):
    pass


class IntegrationError(NumericalError):
    pass


class FitError(NumericalError):
    pass


class ConfluentPoleError(NumericalError):
    pass


class KernelRangeError(NumericalError):
    pass


class PlateauNotReachedError(NumericalError):
    pass


class InsufficientTailError(NumericalError):
    pass


def exit_code_for(exception):
    if isinstance(exception, NumericalError):
        return ExitCode.NUMERICAL
    if isinstance(exception, ValueError):
        return ExitCode.USAGE
    raise exception
