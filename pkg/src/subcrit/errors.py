"""Exception hierarchy shared by the library and the CLI.

Each class carries the CLI exit status it maps to.
"""


class SubcritError(Exception):
    exit_code = 1


class UsageError(SubcritError, ValueError):
    exit_code = 2


class DomainError(SubcritError, ValueError):
    """Argument outside the region where a quantity is defined."""

    exit_code = 3


class NumericError(SubcritError, ArithmeticError):
    """A solver failed to converge, or a system was singular."""

    exit_code = 3

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class UnsupportedFeature(SubcritError, NotImplementedError):
    exit_code = 2


class BudgetExhausted(SubcritError, RuntimeError):
    """Rejection budget ran out. Retrying with a fresh stream is fine."""

    exit_code = 1
    retryable = True

    def __init__(self, message, **stats):
        super().__init__(message)
        self.stats = stats


class ConsistencyError(SubcritError, AssertionError):
    """An identity that must hold exactly failed; results are untrustworthy."""

    exit_code = 1
