"""Exception hierarchy shared by every icap module."""


class ICapError(Exception):
    """Base class; ``code`` is the machine-parsable tag printed by the CLI."""

    code = "ICapError"

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details


class InputError(ICapError, ValueError):
    """Malformed or inconsistent user input (CLI exit code 2)."""


class ParseError(InputError):
    code = "ParseError"


class DimensionError(InputError):
    code = "DimensionError"


class ConstraintError(InputError):
    code = "ConstraintError"


class ShapeMismatch(InputError):
    code = "ShapeMismatch"


class NotSquare(ShapeMismatch):
    code = "NotSquare"


class NotHermitian(InputError):
    code = "NotHermitian"


class NotPSD(InputError):
    code = "NotPSD"


class NotPositiveDefinite(NotPSD):
    code = "NotPositiveDefinite"


class BadOffset(InputError):
    code = "BadOffset"


class NotZIC(InputError):
    code = "NotZIC"


class ConstraintViolation(InputError):
    code = "ConstraintViolation"


class MissingFixture(ICapError, FileNotFoundError):
    code = "MissingFixture"


class DomainError(ICapError, ArithmeticError):
    """The request is well formed but the mathematics refuses it (exit code 1)."""


class NotLeftInvertible(DomainError):
    code = "NotLeftInvertible"


class NoConvergence(DomainError):
    code = "NoConvergence"

    def __init__(self, message="", residual=float("nan"), iterations=0, **details):
        super().__init__(message, residual=residual, iterations=iterations, **details)
        self.residual = residual
        self.iterations = iterations


class SingularBarrier(DomainError):
    code = "SingularBarrier"
