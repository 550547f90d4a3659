"""Exception hierarchy shared by every module.

Domain errors (``NilLaurentError`` subclasses) map to CLI exit code 1;
``ParseError`` maps to exit code 2.
"""

from __future__ import annotations


class NilLaurentError(Exception):
    """Base class for named domain errors."""


class RingMismatchError(NilLaurentError):
    pass


class NotAUnitError(NilLaurentError):
    pass


class NotNilpotentError(NilLaurentError):
    def __init__(self, message: str, exponent=None):
        super().__init__(message)
        self.exponent = exponent


class PrecisionError(NilLaurentError):
    """Raised when a result would depend on coefficients that are not known."""


class DomainError(NilLaurentError):
    """Precondition violated (bad exponent, non-periodic input, ...)."""


class ConsistencyError(NilLaurentError):
    """An internal invariant failed; indicates a bug, never user error."""


class ParseError(Exception):
    def __init__(self, message: str, text: str = "", position: int = 0, expected=()):
        self.text = text
        self.position = position
        self.expected = tuple(expected)
        detail = message
        if expected:
            detail += f" (expected {', '.join(expected)})"
        if text:
            detail += f" at position {position}: {text!r}"
        super().__init__(detail)
