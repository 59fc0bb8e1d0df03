"""Exception hierarchy shared by the services and the CLI."""

from __future__ import annotations

from typing import Iterable


class SignatureCalcError(ValueError):
    """Base class for every error raised by the calculator."""

    exit_code = 1


class InputParseError(SignatureCalcError):
    """Raised when textual input (words, matrices, files) cannot be parsed."""

    exit_code = 2


class ParseError(InputParseError):
    """Raised by the word/file parsers with a position and the expected tokens."""

    def __init__(
        self,
        message: str,
        *,
        line: int = 1,
        column: int = 1,
        expected: Iterable[str] = (),
        source: str | None = None,
    ) -> None:
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        self.source = source
        location = f"{source}:" if source else ""
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{location}{line}:{column}: {message}{detail}")


class MatrixFormatError(InputParseError):
    """Raised when the `1,-1;0,1` matrix syntax is malformed."""


class DimensionMismatch(SignatureCalcError):
    """Raised when vectors or matrices of different sizes are combined."""


class NotSymplectic(SignatureCalcError):
    """Raised when a matrix does not preserve the intersection form."""


class ConventionViolation(SignatureCalcError):
    """Raised when a computation contradicts the chosen sign convention."""


class CalibrationError(ConventionViolation):
    """Raised when no twist convention reproduces the calibration values."""


class RelatorViolation(SignatureCalcError):
    """Raised when a monodromy relator does not evaluate to the identity."""


class ConstraintViolation(SignatureCalcError):
    """Raised when an atlas constraint or relation fails."""

    def __init__(self, message: str, *, constraint: str | None = None) -> None:
        self.constraint = constraint
        super().__init__(message)


class UnknownAtlas(SignatureCalcError, LookupError):
    """Raised when no atlas file with the requested name exists."""


class UnknownCurve(SignatureCalcError, LookupError):
    """Raised when a curve name is missing from an atlas."""


class UnknownName(SignatureCalcError, LookupError):
    """Raised when a word refers to an undefined curve or diffeomorphism."""


class CyclicDefinition(SignatureCalcError):
    """Raised when named diffeomorphism definitions refer to each other."""


class GenusTooSmall(SignatureCalcError):
    """Raised when a configuration cannot be embedded in the requested genus."""


class IndexOutOfRange(SignatureCalcError, IndexError):
    """Raised when a Hurwitz move or grouping refers to a missing letter."""


class IncompatibleGrouping(SignatureCalcError):
    """Raised when singular fibers grouped for subtraction do not match."""


class CombinatorialMismatch(SignatureCalcError):
    """Raised when a full subtraction pairs fibrations with different mu_comb."""


class MissingZeroSection(SignatureCalcError):
    """Raised when a fiber sum input lacks a section of square zero."""


class BaseMismatch(SignatureCalcError):
    """Raised when bundles over different base surfaces are combined."""


class NotASurfaceBundle(SignatureCalcError):
    """Raised when an operation needs a bundle but singular fibers remain."""


__all__ = [
    "BaseMismatch",
    "CalibrationError",
    "CombinatorialMismatch",
    "ConstraintViolation",
    "ConventionViolation",
    "CyclicDefinition",
    "DimensionMismatch",
    "GenusTooSmall",
    "IncompatibleGrouping",
    "IndexOutOfRange",
    "InputParseError",
    "MatrixFormatError",
    "MissingZeroSection",
    "NotASurfaceBundle",
    "NotSymplectic",
    "ParseError",
    "RelatorViolation",
    "SignatureCalcError",
    "UnknownAtlas",
    "UnknownCurve",
    "UnknownName",
]
