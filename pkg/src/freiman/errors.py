"""Exception hierarchy shared by every module."""


class FreimanError(Exception):
    pass


class InputError(FreimanError, ValueError):
    """Malformed input: bad file contents, arity mismatch, violated precondition."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BudgetExceeded(FreimanError):
    """An enumeration or search would exceed its configured cap."""

    def __init__(self, what, needed, budget):
        self.what = what
        self.needed = needed
        self.budget = budget
        super().__init__(f"{what}: needs {needed}, budget is {budget}")


class PreconditionError(FreimanError, ValueError):
    pass


class InternalVerificationError(FreimanError, AssertionError):
    """A construction failed its own re-verification. Always a bug."""


class PrecisionError(FreimanError):
    """Interval evaluation could not separate the two sides of a comparison."""
