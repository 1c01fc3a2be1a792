"""
Python module containing exceptions raised by the pcis toolkit.
"""


class PcisError(Exception):
    """Base class for every error raised by the toolkit."""


class InvalidArgumentError(PcisError, ValueError):
    """Raised when an operation receives an argument outside its domain."""


class ContractViolationError(PcisError):
    """Raised when a caller breaks a precondition the recursion relies on."""


class ConfigurationError(PcisError):
    """Raised when experiment configuration or dimensions are inconsistent."""


class GridMismatchError(ConfigurationError):
    """Raised when a stored mask was built on a different lattice than the config."""


class DatasetParseError(PcisError):
    """Raised when a CSV artifact cannot be parsed."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        prefix = f"line {line_number}: " if line_number is not None else ""
        super().__init__(f"{prefix}{message}")


class SchemaVersionError(DatasetParseError):
    """Raised when a CSV artifact declares an unknown schema kind or version."""


class DataSeparationError(PcisError):
    """Raised when certification transitions leak into learner updates or grow data."""
