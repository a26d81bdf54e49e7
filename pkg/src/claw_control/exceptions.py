"""Exception hierarchy shared by all modules."""


class ClawControlError(Exception):
    """Base class for every error raised by the package."""


class EvaluationError(ClawControlError, ArithmeticError):
    pass


class InvalidInterval(ClawControlError, ValueError):
    pass


class InvalidDirection(ClawControlError, ValueError):
    pass


class InvalidResolution(ClawControlError, ValueError):
    pass


class NoCertificate(ClawControlError):
    """The replacement condition cannot be certified for the given data."""


class DegenerateDynamics(ClawControlError):
    """All flux derivatives vanish on the invariant interval."""


class CflViolation(ClawControlError, ValueError):
    pass


class NumericalBlowup(ClawControlError, FloatingPointError):
    pass


class InsufficientData(ClawControlError, ValueError):
    pass


class SnapshotMiss(ClawControlError, LookupError):
    pass


class HorizonTooShort(ClawControlError, ValueError):
    pass


class InvalidConstantState(ClawControlError, ValueError):
    pass


class GridMismatch(ClawControlError, ValueError):
    pass


class ScheduleMismatch(ClawControlError, ValueError):
    pass


class ParseError(ClawControlError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(ClawControlError, ValueError):
    def __init__(self, field, message=""):
        self.field = field
        super().__init__(f"{field}: {message}" if message else field)
