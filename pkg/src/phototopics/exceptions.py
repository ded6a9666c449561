"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ValidationError -> 2,
InputOutputError -> 3, NumericError -> 4.
"""


class PhototopicsError(Exception):
    """Base class for all package errors."""


class ValidationError(PhototopicsError):
    """Malformed or inconsistent input data."""


class InputOutputError(PhototopicsError):
    """File or network I/O failure."""


class NumericError(PhototopicsError):
    """Numerical failure (non-finite values, degenerate inputs)."""


class TransportError(InputOutputError):
    """Tagging endpoint unreachable."""
