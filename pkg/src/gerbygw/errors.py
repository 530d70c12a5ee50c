"""Exception hierarchy shared by all modules."""


class GerbyError(Exception):
    """Base class. ``pointer`` is a JSON pointer into the offending input, if known."""

    def __init__(self, message, pointer=None):
        super().__init__(message)
        self.pointer = pointer


class InputError(GerbyError, ValueError):
    """Malformed or inconsistent user input."""


class GraphError(InputError):
    pass


class GroupError(InputError):
    pass


class StabilizationError(GerbyError):
    pass


class BudgetExceeded(GerbyError):
    pass


class VerificationError(GerbyError):
    """An internal exact consistency check failed. Always a bug."""
