"""Exception hierarchy. The CLI maps each family to an exit code."""


class SpurMaxTError(Exception):
    """Base class for all package errors."""


class InputError(SpurMaxTError):
    """Unreadable or malformed input (exit code 2)."""


class ParseError(InputError):
    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class SchemaError(InputError):
    pass


class ValidationError(SpurMaxTError, ValueError):
    """Well-formed input that violates a precondition (exit code 3)."""


class NumericError(SpurMaxTError, ArithmeticError):
    """Numerical failure such as a degenerate variable (exit code 4)."""


class DegenerateVariableError(NumericError):
    def __init__(self, s, j, name=None):
        self.s = s
        self.j = j
        label = f"{name!r}" if name is not None else f"j={j}"
        super().__init__(
            f"variable {label} has zero variance in both group 0 and group {s}; "
            "its t-statistic is undefined"
        )


class NotPositiveDefiniteError(NumericError):
    pass
