"""Shared fixtures: a fixed twist convention and the shipped fibrations loaded once."""

from __future__ import annotations

import random
from typing import Callable, List

import pytest
from sympy import ImmutableMatrix

from app.services.loader import load_fibration
from app.services.sympl import Convention, identity, product, transvection

CALIBRATED = Convention(twist_sign=1)
MAX_TRANSVECTIONS = 12


@pytest.fixture(scope="session")
def convention() -> Convention:
    return CALIBRATED


@pytest.fixture(scope="session")
def shipped():
    """Loads a shipped fibration at most once per (name, genus)."""

    cache = {}

    def load(name: str, genus: int | None = None):
        key = (name, genus)
        if key not in cache:
            cache[key] = load_fibration(name, genus=genus, convention=CALIBRATED)
        return cache[key]

    return load


def random_symplectic(rng: random.Random, h: int, length: int = 4) -> ImmutableMatrix:
    """Product of random integral transvections in Sp(2h, Z)."""

    factors: List[ImmutableMatrix] = []
    for _ in range(length):
        vector = [rng.randint(-1, 1) for _ in range(2 * h)]
        if not any(vector):
            vector[0] = 1
        factors.append(transvection(vector, rng.choice((1, -1))))
    return product(factors, size=2 * h) if factors else identity(2 * h)


@pytest.fixture
def symplectic_factory() -> Callable[..., ImmutableMatrix]:
    """Seeded random elements; `length=None` draws 1..MAX_TRANSVECTIONS factors."""

    rng = random.Random(20240611)

    def make(h: int = 2, length: int | None = 4) -> ImmutableMatrix:
        if length is None:
            length = rng.randint(1, MAX_TRANSVECTIONS)
        return random_symplectic(rng, h, length)

    return make
