"""Exception types shared across the package.

Each class maps to one failure family so the CLI can translate them
into stable exit codes.
"""


class MlpSensError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(MlpSensError):
    """Invalid user input: shapes, names, flags, malformed documents."""


class ParseError(ValidationError):
    """Malformed model or dataset document; message carries the field path."""


class DivergenceError(MlpSensError):
    """Training produced a non-finite loss or non-finite weights."""

    def __init__(self, epoch: int, message: str = ""):
        self.epoch = epoch
        super().__init__(message or f"training diverged at epoch {epoch}")


class UnsupportedStructureError(MlpSensError):
    """Network shape outside an algorithm's domain (e.g. >1 hidden layer)."""


class DegenerateDistributionError(MlpSensError):
    """All sample values identical; no density estimate exists."""
