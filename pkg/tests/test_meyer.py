import random

import pytest
from sympy import ImmutableMatrix

from app.core.errors import DimensionMismatch
from app.services.meyer import form_signature, kernel_space, tau
from app.services.sympl import (
    commutator,
    conjugate,
    identity,
    intersection_matrix,
    inverse,
    product,
)

SAMPLES = 200
GENUS = 3


def _power(matrix: ImmutableMatrix, exponent: int) -> ImmutableMatrix:
    base = matrix if exponent > 0 else inverse(matrix)
    return product([base] * abs(exponent), size=matrix.shape[0])


def test_tau_of_j_with_itself():
    j = intersection_matrix(1)
    assert tau(j, j) == 2


def test_cocycle_identity_and_bounds(symplectic_factory):
    for _ in range(SAMPLES):
        a, b, c = (symplectic_factory(GENUS, None) for _ in range(3))
        values = [tau(a, b), tau(product([a, b]), c), tau(a, product([b, c])), tau(b, c)]
        assert values[0] + values[1] == values[2] + values[3]
        assert all(abs(value) <= 2 * GENUS for value in values)


def test_tau_with_identity_vanishes(symplectic_factory):
    one = identity(2 * GENUS)
    for _ in range(SAMPLES):
        m = symplectic_factory(GENUS, None)
        assert tau(one, m) == 0
        assert tau(m, one) == 0


def test_conjugation_invariance(symplectic_factory):
    for _ in range(SAMPLES):
        a, b, c = (symplectic_factory(GENUS, None) for _ in range(3))
        assert tau(conjugate(c, a), conjugate(c, b)) == tau(a, b)


def test_commutator_expansion(symplectic_factory):
    # tau([A,B], B) expands through the cocycle identity
    for _ in range(SAMPLES):
        a, b = symplectic_factory(GENUS, None), symplectic_factory(GENUS, None)
        ab = product([a, b])
        expected = -(
            tau(a, b)
            + tau(ab, inverse(a))
            + tau(product([ab, inverse(a)]), inverse(b))
        )
        assert tau(commutator(a, b), b) == expected


def test_commuting_pairs_give_zero(symplectic_factory):
    rng = random.Random(5)
    for _ in range(SAMPLES):
        a = symplectic_factory(GENUS, None)
        m, n = rng.choice((-2, -1, 1, 2, 3)), rng.choice((-2, -1, 1, 2, 3))
        left, right = _power(a, m), _power(a, n)
        assert commutator(left, right) == identity(2 * GENUS)
        assert tau(commutator(left, right), right) == 0


def test_tau_against_inverse_and_symmetry(symplectic_factory):
    for _ in range(50):
        a, b = symplectic_factory(GENUS, None), symplectic_factory(GENUS, None)
        assert tau(a, inverse(a)) == 0
        assert tau(a, b) == tau(b, a)


def test_tau_is_bounded_by_kernel_dimension(symplectic_factory):
    for _ in range(20):
        a, b = symplectic_factory(2, 5), symplectic_factory(2, 5)
        assert abs(tau(a, b)) <= len(kernel_space(a, b))


def test_kernel_space_of_identities_is_everything():
    assert len(kernel_space(identity(2), identity(2))) == 4


def test_form_signature_handles_hyperbolic_blocks():
    hyperbolic = ImmutableMatrix([[0, 1, 0], [1, 0, 0], [0, 0, -3]])
    assert form_signature(hyperbolic) == -1
    assert form_signature(ImmutableMatrix([[2, 1], [1, 2]])) == 2
    assert form_signature(ImmutableMatrix(0, 0, [])) == 0


def test_tau_rejects_mismatched_sizes():
    with pytest.raises(DimensionMismatch):
        tau(identity(2), identity(4))
