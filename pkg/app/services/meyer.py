"""Meyer's signature cocycle on Sp(2h, Z), evaluated with exact rational linear algebra."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List

from sympy import ImmutableMatrix, Matrix, Rational

from app.core.errors import ConventionViolation, DimensionMismatch
from app.services.sympl import identity, intersection_matrix, inverse

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SymmetricForm:
    """Gram matrix of the (symmetrized) Meyer form on V_{A,B}."""

    gram: ImmutableMatrix

    @property
    def basis_dim(self) -> int:
        return self.gram.shape[0]


def _check_pair(a: Matrix, b: Matrix) -> int:
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(
            f"tau needs two square matrices of equal size, got {a.shape} and {b.shape}."
        )
    return a.shape[0]


def kernel_space(a: Matrix, b: Matrix) -> List[ImmutableMatrix]:
    """Rational basis of V_{A,B} = {(x, y) : (A^-1 - I) x + (B - I) y = 0}."""

    size = _check_pair(a, b)
    ident = identity(size)
    system = Matrix(inverse(a) - ident).row_join(Matrix(b - ident))
    return [ImmutableMatrix(vector) for vector in system.nullspace()]


def meyer_form(a: Matrix, b: Matrix, basis: List[ImmutableMatrix]) -> SymmetricForm:
    """Gram matrix of (x1 + y1)^T J (I - B) y2 on the given basis of V_{A,B}."""

    size = _check_pair(a, b)
    if not basis:
        return SymmetricForm(gram=ImmutableMatrix(0, 0, []))
    stacked = Matrix.hstack(*basis)
    xs = stacked[:size, :]
    ys = stacked[size:, :]
    form = intersection_matrix(size // 2)
    raw = (xs + ys).T * form * (identity(size) - b) * ys
    if raw != raw.T:
        raise ConventionViolation(
            "Meyer form is not symmetric on V_{A,B}; the kernel or pairing "
            "convention upstream is inconsistent."
        )
    return SymmetricForm(gram=ImmutableMatrix((raw + raw.T) / 2))


def form_signature(form: SymmetricForm | Matrix) -> int:
    """Signature by symmetric Gaussian reduction over Q.

    A nonzero diagonal pivot contributes its sign; with an all-zero diagonal a
    hyperbolic 2x2 block is split off and contributes nothing.
    """

    gram = form.gram if isinstance(form, SymmetricForm) else form
    work = Matrix(gram)
    signature = 0
    while work.shape[0]:
        size = work.shape[0]
        pivot = next((k for k in range(size) if work[k, k] != 0), None)
        if pivot is not None:
            value = Rational(work[pivot, pivot])
            signature += 1 if value > 0 else -1
            rest = [k for k in range(size) if k != pivot]
            if not rest:
                break
            column = work.extract(rest, [pivot])
            work = work.extract(rest, rest) - column * column.T / value
            continue

        pair = next(
            ((i, j) for i in range(size) for j in range(i + 1, size) if work[i, j] != 0),
            None,
        )
        if pair is None:
            break
        block_idx = list(pair)
        rest = [k for k in range(size) if k not in pair]
        if not rest:
            break
        block = work.extract(block_idx, block_idx)
        coupling = work.extract(rest, block_idx)
        work = work.extract(rest, rest) - coupling * block.inv() * coupling.T
    return signature


def tau(a: Matrix, b: Matrix) -> int:
    """Meyer cocycle tau_h(A, B)."""

    basis = kernel_space(a, b)
    value = form_signature(meyer_form(a, b, basis))
    logger.debug("tau evaluated (dim V=%s, value=%s)", len(basis), value)
    return value


__all__ = ["SymmetricForm", "form_signature", "kernel_space", "meyer_form", "tau"]
