"""Exact arithmetic for nil-Laurent series, the residue form, Witt vectors
and twisted Virasoro representations."""

from __future__ import annotations

from .diffeo import FormalDiffeo
from .errors import (
    ConsistencyError,
    DomainError,
    NilLaurentError,
    NotAUnitError,
    NotNilpotentError,
    ParseError,
    PrecisionError,
    RingMismatchError,
)
from .laurent import LaurentSeries
from .nil_laurent import NilLaurentElement, certify
from .parse import parse_ring, parse_series
from .ring import QQ, RingDescriptor, RingElement
from .witt import WittVector

__all__ = [
    "QQ",
    "ConsistencyError",
    "DomainError",
    "FormalDiffeo",
    "LaurentSeries",
    "NilLaurentElement",
    "NilLaurentError",
    "NotAUnitError",
    "NotNilpotentError",
    "ParseError",
    "PrecisionError",
    "RingDescriptor",
    "RingElement",
    "RingMismatchError",
    "WittVector",
    "certify",
    "parse_ring",
    "parse_series",
]
