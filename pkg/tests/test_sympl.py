import pytest
from sympy import ImmutableMatrix

from app.core.errors import DimensionMismatch, MatrixFormatError, NotSymplectic
from app.services.sympl import (
    Convention,
    apply,
    conjugate,
    ensure_symplectic,
    format_matrix,
    identity,
    intersection_matrix,
    inverse,
    is_symplectic,
    pad_vector,
    pairing,
    parse_matrix,
    product,
    transvection,
)


def test_intersection_matrix_blocks():
    form = intersection_matrix(2)
    assert form == ImmutableMatrix(
        [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]
    )


def test_pairing_is_antisymmetric():
    u, v = (1, 0, 2, -1), (0, 1, 1, 3)
    assert pairing(u, v) == 1 * 1 + (2 * 3 - (-1) * 1)
    assert pairing(v, u) == -pairing(u, v)
    assert pairing(u, u) == 0


def test_pairing_rejects_unequal_lengths():
    with pytest.raises(DimensionMismatch):
        pairing((1, 0), (1, 0, 0, 0))


@pytest.mark.parametrize(
    "sign, expected",
    [(1, [[1, 1], [0, 1]]), (-1, [[1, -1], [0, 1]])],
)
def test_transvection_genus_one(sign, expected):
    assert transvection((1, 0), sign=sign) == ImmutableMatrix(expected)


def test_transvection_powers_are_linear():
    c = (1, -1, 0, 1)
    cubed = product([transvection(c)] * 3)
    assert transvection(c, 3) == cubed
    assert transvection(c, -1) == inverse(transvection(c))


def test_transvections_are_symplectic(symplectic_factory):
    for _ in range(5):
        assert is_symplectic(symplectic_factory(2, 5))


def test_conjugation_moves_the_twist_curve(symplectic_factory):
    c = (1, 0, 1, 1)
    for _ in range(4):
        m = symplectic_factory(2, 3)
        assert conjugate(m, transvection(c)) == transvection(apply(m, c))


def test_inverse_and_identity(symplectic_factory):
    m = symplectic_factory(2, 6)
    assert product([m, inverse(m)]) == identity(4)
    assert product([], size=4) == identity(4)


def test_empty_product_needs_size():
    with pytest.raises(DimensionMismatch):
        product([])


def test_product_rejects_mixed_sizes():
    with pytest.raises(DimensionMismatch):
        product([identity(2), identity(4)])


def test_ensure_symplectic_rejects_non_symplectic():
    with pytest.raises(NotSymplectic):
        ensure_symplectic(ImmutableMatrix([[1, 1], [1, 1]]))
    assert not is_symplectic(ImmutableMatrix([[2, 0], [0, 1]]))


def test_parse_and_format_matrix():
    matrix = parse_matrix(" 1, -1 ; 0, 1 ")
    assert matrix == ImmutableMatrix([[1, -1], [0, 1]])
    assert format_matrix(matrix) == "1,-1;0,1"
    assert parse_matrix("I", h=2) == identity(4)


@pytest.mark.parametrize("text", ["", "1,x;0,1", "1,0;0", "1,0;;0,1"])
def test_parse_matrix_rejects_malformed_text(text):
    with pytest.raises(MatrixFormatError):
        parse_matrix(text)


def test_parse_matrix_checks_genus():
    with pytest.raises(DimensionMismatch):
        parse_matrix("1,0;0,1", h=2)
    with pytest.raises(MatrixFormatError):
        parse_matrix("I")


def test_pad_vector():
    assert pad_vector((1, 0), 2) == (1, 0, 0, 0)
    assert pad_vector((1, 0, 0, 0), 1) == (1, 0)
    with pytest.raises(DimensionMismatch):
        pad_vector((1, 0, 0, 1), 1)


def test_convention_validation():
    assert Convention().twist_sign == 1
    assert Convention(twist_sign=1).flipped().twist_sign == -1
    with pytest.raises(ValueError):
        Convention(twist_sign=2)
    with pytest.raises(ValueError):
        Convention(word_order="right_to_left")
