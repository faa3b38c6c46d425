"""Exception hierarchy shared by all modules."""


class KronspinError(Exception):
    """Base class for package errors."""


class DomainError(KronspinError, ValueError):
    """An argument lies outside the domain of an operation."""


class ConfigurationError(KronspinError, ValueError):
    """Invalid group, map or run configuration."""


class ExactArithmeticError(KronspinError, ArithmeticError):
    """Division by zero or inversion of a non-unit."""


class UnsupportedWordError(KronspinError):
    """A word falls outside the class the engine can normalize."""


class VerificationFailure(KronspinError):
    """A computed value disagrees with its expected value."""

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record
