"""Exact arithmetic in Sp(2h, Z): intersection form, Dehn-twist transvections, products."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Iterable, Sequence, Tuple

from sympy import ImmutableMatrix, Matrix, eye, zeros

from app.core.errors import DimensionMismatch, MatrixFormatError, NotSymplectic

HomologyVector = Tuple[int, ...]
SymplecticMatrix = ImmutableMatrix

LEFT_TO_RIGHT = "left_to_right"
CALIBRATED_TWIST_SIGN = 1


@dataclass(frozen=True)
class Convention:
    """Twist sign and word order under which matrices are produced.

    A twist along c acts as T_c = I + twist_sign * c c^T J, and words are
    multiplied left to right.
    """

    twist_sign: int = CALIBRATED_TWIST_SIGN
    word_order: str = LEFT_TO_RIGHT
    calibrated_against: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        if self.twist_sign not in (1, -1):
            raise ValueError(f"twist_sign must be 1 or -1 (got {self.twist_sign})")
        if self.word_order != LEFT_TO_RIGHT:
            raise ValueError(f"Unsupported word order: {self.word_order}")

    def flipped(self) -> "Convention":
        return Convention(twist_sign=-self.twist_sign, word_order=self.word_order)


DEFAULT_CONVENTION = Convention()


@lru_cache(maxsize=None)
def intersection_matrix(h: int) -> ImmutableMatrix:
    form = zeros(2 * h, 2 * h)
    for block in range(h):
        form[2 * block, 2 * block + 1] = 1
        form[2 * block + 1, 2 * block] = -1
    return ImmutableMatrix(form)


@lru_cache(maxsize=None)
def identity(size: int) -> ImmutableMatrix:
    return ImmutableMatrix(eye(size))


def _freeze(matrix: Matrix) -> ImmutableMatrix:
    if isinstance(matrix, ImmutableMatrix):
        return matrix
    return ImmutableMatrix(matrix)


def _genus_of(size: int) -> int:
    if size <= 0 or size % 2:
        raise DimensionMismatch(f"Expected an even positive dimension, got {size}.")
    return size // 2


def as_column(coords: Sequence[int]) -> ImmutableMatrix:
    return ImmutableMatrix(len(coords), 1, [int(value) for value in coords])


def pairing(u: Sequence[int], v: Sequence[int]) -> int:
    """Algebraic intersection number <u, v> = u^T J v."""

    if len(u) != len(v):
        raise DimensionMismatch(
            f"Cannot pair vectors of length {len(u)} and {len(v)}."
        )
    h = _genus_of(len(u))
    total = 0
    for block in range(h):
        total += u[2 * block] * v[2 * block + 1] - u[2 * block + 1] * v[2 * block]
    return int(total)


def transvection(
    c: Sequence[int],
    power: int = 1,
    *,
    sign: int = CALIBRATED_TWIST_SIGN,
) -> ImmutableMatrix:
    """Return T_c^power with T_c = I + sign * c c^T J.

    (c c^T J)^2 = 0 because <c, c> = 0, so the power is linear in `power`.
    """

    size = len(c)
    form = intersection_matrix(_genus_of(size))
    column = as_column(c)
    nilpotent = column * column.T * form
    return _freeze(identity(size) + sign * power * nilpotent)


def is_symplectic(matrix: Matrix) -> bool:
    rows, cols = matrix.shape
    if rows != cols or rows == 0 or rows % 2:
        return False
    if not all(getattr(entry, "is_Integer", False) for entry in matrix):
        return False
    form = intersection_matrix(rows // 2)
    return matrix.T * form * matrix == form


def ensure_symplectic(matrix: Matrix, *, label: str = "matrix") -> ImmutableMatrix:
    if not is_symplectic(matrix):
        raise NotSymplectic(f"{label} is not symplectic (M^T J M != J).")
    return _freeze(matrix)


def _check_same_size(matrices: Iterable[Matrix]) -> int | None:
    size: int | None = None
    for matrix in matrices:
        rows, cols = matrix.shape
        if rows != cols:
            raise DimensionMismatch(f"Expected a square matrix, got {rows}x{cols}.")
        if size is None:
            size = rows
        elif rows != size:
            raise DimensionMismatch(
                f"Cannot multiply {size}x{size} with {rows}x{rows} matrices."
            )
    return size


def product(matrices: Sequence[Matrix], *, size: int | None = None) -> ImmutableMatrix:
    """Multiply in word order: the leftmost factor is the leftmost matrix."""

    found = _check_same_size(matrices)
    if found is None:
        if size is None:
            raise DimensionMismatch("An empty product needs an explicit size.")
        return identity(size)
    if size is not None and size != found:
        raise DimensionMismatch(f"Expected {size}x{size} factors, got {found}x{found}.")
    return _freeze(reduce(lambda left, right: left * right, matrices))


def inverse(matrix: Matrix) -> ImmutableMatrix:
    """Inverse of a symplectic matrix, M^-1 = -J M^T J."""

    form = intersection_matrix(_genus_of(matrix.shape[0]))
    return _freeze(-form * matrix.T * form)


def commutator(a: Matrix, b: Matrix) -> ImmutableMatrix:
    """[A, B] = A B A^-1 B^-1."""

    return product([a, b, inverse(a), inverse(b)])


def conjugate(by: Matrix, matrix: Matrix) -> ImmutableMatrix:
    """Return by * matrix * by^-1."""

    return product([by, matrix, inverse(by)])


def apply(matrix: Matrix, coords: Sequence[int]) -> HomologyVector:
    if matrix.shape[1] != len(coords):
        raise DimensionMismatch(
            f"Cannot apply a {matrix.shape[0]}x{matrix.shape[1]} matrix "
            f"to a vector of length {len(coords)}."
        )
    image = matrix * as_column(coords)
    return tuple(int(value) for value in image)


def pad_vector(coords: Sequence[int], h: int) -> HomologyVector:
    """Zero-pad (or trim trailing zeros of) a vector to dimension 2h."""

    size = 2 * h
    if len(coords) <= size:
        return tuple(coords) + (0,) * (size - len(coords))
    if any(coords[size:]):
        raise DimensionMismatch(
            f"Vector {tuple(coords)} does not fit in genus {h}."
        )
    return tuple(coords[:size])


_ROW_SPLIT = re.compile(r";")


def parse_matrix(text: str, *, h: int | None = None) -> ImmutableMatrix:
    """Parse the `1,-1;0,1` syntax. `I` stands for the identity when h is given."""

    compact = re.sub(r"\s+", "", text)
    if compact in {"I", "1", "id"}:
        if h is None:
            raise MatrixFormatError("Identity shorthand needs the genus (--h).")
        return identity(2 * h)
    if not compact:
        raise MatrixFormatError("Empty matrix text.")
    rows = []
    for row_text in _ROW_SPLIT.split(compact):
        if not row_text:
            raise MatrixFormatError(f"Empty row in matrix text {text!r}.")
        try:
            rows.append([int(entry) for entry in row_text.split(",")])
        except ValueError as exc:
            raise MatrixFormatError(f"Non-integer entry in {text!r}.") from exc
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise MatrixFormatError(f"Ragged matrix rows in {text!r}.")
    matrix = ImmutableMatrix(rows)
    if h is not None and matrix.shape != (2 * h, 2 * h):
        raise DimensionMismatch(
            f"Expected a {2 * h}x{2 * h} matrix for genus {h}, got "
            f"{matrix.shape[0]}x{matrix.shape[1]}."
        )
    return matrix


def format_matrix(matrix: Matrix) -> str:
    return ";".join(
        ",".join(str(matrix[row, col]) for col in range(matrix.shape[1]))
        for row in range(matrix.shape[0])
    )


__all__ = [
    "CALIBRATED_TWIST_SIGN",
    "Convention",
    "DEFAULT_CONVENTION",
    "HomologyVector",
    "LEFT_TO_RIGHT",
    "SymplecticMatrix",
    "apply",
    "as_column",
    "commutator",
    "conjugate",
    "ensure_symplectic",
    "format_matrix",
    "identity",
    "intersection_matrix",
    "inverse",
    "is_symplectic",
    "pad_vector",
    "pairing",
    "parse_matrix",
    "product",
    "transvection",
]
