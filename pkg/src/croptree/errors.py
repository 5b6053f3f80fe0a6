"""Exception types shared across the package."""


class DataError(Exception):
    """Input data violates the file grammar or a value constraint.

    Commands map this to exit code 2.
    """


class MissingMonthError(DataError):
    """A rainfall slot is missing under a policy that forbids it."""

    def __init__(self, month_index: int, message: str):
        super().__init__(message)
        self.month_index = month_index


class ModelFormatError(DataError):
    """A model file cannot be parsed.  Carries the offending line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number
