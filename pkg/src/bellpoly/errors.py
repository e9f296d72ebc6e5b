"""Exception taxonomy shared by every module in the package."""

from __future__ import annotations


class BellPolyError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(BellPolyError, ValueError):
    """A parameter violates an operation's contract."""


class ResourceLimitError(BellPolyError):
    """An enumeration or matrix size exceeds its configured cap."""


class DataFormatError(BellPolyError):
    """A text input (file or inline) failed to parse."""

    def __init__(self, message: str, *, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class IncompleteDataError(BellPolyError):
    """A correlation vector lacks values for terms the polynomial needs."""

    def __init__(self, message: str, *, missing: tuple = ()):
        super().__init__(message)
        self.missing = tuple(missing)


class InconsistentInputError(BellPolyError):
    """A measured value is impossible for the polynomial it claims to come from."""


class NotTabulatedError(BellPolyError):
    """No closed form is stored for this bound; compute it numerically instead."""


class NumericalIntegrityError(BellPolyError):
    """A numerical result failed an internal consistency check."""
