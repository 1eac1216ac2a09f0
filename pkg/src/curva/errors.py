"""Error taxonomy shared across the library.

Each class maps to a distinct CLI exit code so that callers can react to
failure modes mechanically (see ``curva.cli``).
"""

from __future__ import annotations


class CurvaError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class PrecisionError(CurvaError):
    """A series is not known to a high enough order for the request.

    ``required`` names the truncation order that would have sufficed.
    """

    exit_code = 3

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class ValidationError(CurvaError):
    """Malformed or mathematically inadmissible input."""

    exit_code = 4


class GuardError(CurvaError):
    """An internal termination or consistency guard tripped.

    Raised instead of ever returning a potentially wrong answer.
    """

    exit_code = 5


class DegreeInstabilityError(CurvaError):
    """The generating-space degree bound failed to stabilize."""

    exit_code = 5

    def __init__(self, message: str, suggested_degree: int | None = None):
        super().__init__(message)
        self.suggested_degree = suggested_degree
