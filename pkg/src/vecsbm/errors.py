class VecSbmError(Exception):
    """Base class for all package errors."""


class ConfigError(VecSbmError, ValueError):
    """Invalid model or scenario configuration."""


class InputError(VecSbmError, ValueError):
    """Malformed or inconsistent user input (files, partitions, sizes)."""


class PartitionError(VecSbmError, ValueError):
    """A partition violates a precondition, e.g. an empty community."""


class NumericError(VecSbmError, ArithmeticError):
    """A numerical routine failed (non-convergence, singular matrix)."""

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details
