import random

import pytest

from app.core.errors import CyclicDefinition, IndexOutOfRange, ParseError, UnknownName
from app.services.atlas import CurveAtlas, CurveClass
from app.services.sympl import Convention, identity, inverse, product, transvection
from app.services.words import (
    LEFT,
    RIGHT,
    Commutator,
    Concat,
    Factorization,
    Inverse,
    NamedDiffeo,
    Power,
    SingularFiber,
    Twist,
    cyclic_shift,
    evaluate,
    evaluate_many,
    hurwitz_move,
    letters_from_word,
    parse_word,
    print_word,
    word_names,
)

TORUS = CurveAtlas(
    name="torus",
    h=1,
    curves={"a": CurveClass("a", (1, 0)), "b": CurveClass("b", (0, 1))},
)


def test_parse_twists_and_inverses():
    assert parse_word("t(a)") == Twist("a")
    assert parse_word("t(a)'") == Twist("a", -1)
    assert parse_word("t(a)^-1") == Twist("a", -1)
    assert parse_word("t(a)''") == Inverse(Twist("a", -1))
    assert parse_word("t(a)^3") == Power(Twist("a"), 3)


def test_parse_structure():
    word = parse_word("(t(a) t(b))^6 [phi, t(b)'] # trailing comment")
    assert word == Concat(
        (
            Power(Concat((Twist("a"), Twist("b"))), 6),
            Commutator(NamedDiffeo("phi"), Twist("b", -1)),
        )
    )
    assert parse_word("") == Concat(())


@pytest.mark.parametrize(
    "text",
    [
        "t(a) t(b)' [t(a), phi^2]",
        "(t(a) t(b))^-2 psi'",
        "[[t(a), t(b)], t(a)^3]",
        "(t(a))^-1 t(b)''",
    ],
)
def test_printing_is_canonical(text):
    word = parse_word(text)
    assert parse_word(print_word(word)) == word


CURVES = ("a", "b2", "t")
DIFFEOS = ("phi", "psi", "tt", "t_1")
EXPONENTS = (-3, -2, -1, 1, 2, 4)


def _random_word(rng: random.Random, depth: int):
    kinds = ("twist", "name", "inverse", "power", "commutator", "concat") if depth else ("twist", "name")
    kind = rng.choice(kinds)
    if kind == "twist":
        return Twist(rng.choice(CURVES), rng.choice((1, -1)))
    if kind == "name":
        return NamedDiffeo(rng.choice(DIFFEOS))
    if kind == "inverse":
        return Inverse(_random_word(rng, depth - 1))
    if kind == "power":
        return Power(_random_word(rng, depth - 1), rng.choice(EXPONENTS))
    if kind == "commutator":
        return Commutator(_random_word(rng, depth - 1), _random_word(rng, depth - 1))
    return Concat(tuple(_random_word(rng, depth - 1) for _ in range(rng.choice((0, 2, 3)))))


def test_random_words_survive_printing():
    rng = random.Random(3)
    for _ in range(200):
        word = _random_word(rng, rng.randint(1, 4))
        text = print_word(word)
        assert parse_word(text) == word, text


def test_bare_t_is_reserved_for_twists():
    with pytest.raises(ValueError):
        NamedDiffeo("t")
    with pytest.raises(ParseError) as excinfo:
        parse_word("t phi")
    assert excinfo.value.expected == ("(",)
    assert parse_word("t(t) tt") == Concat((Twist("t"), NamedDiffeo("tt")))


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as excinfo:
        parse_word("t(a) t(")
    error = excinfo.value
    assert (error.line, error.column) == (1, 8)
    assert "curve name" in error.expected


def test_parse_error_on_zero_exponent_and_stray_characters():
    with pytest.raises(ParseError):
        parse_word("t(a)^0")
    with pytest.raises(ParseError):
        parse_word("t(a) $")
    with pytest.raises(ParseError):
        parse_word("[t(a) t(b)]")


def test_evaluate_matches_transvections():
    ta, tb = transvection((1, 0)), transvection((0, 1))
    assert evaluate(parse_word("t(a) t(b)"), TORUS) == product([ta, tb])
    assert evaluate(parse_word("t(a)'"), TORUS) == inverse(ta)
    assert evaluate(parse_word("[t(a), t(b)]"), TORUS) == product(
        [ta, tb, inverse(ta), inverse(tb)]
    )
    assert evaluate(parse_word(""), TORUS) == identity(2)


def test_torus_relations_hold_in_both_conventions():
    for sign in (1, -1):
        convention = Convention(twist_sign=sign)
        braid_l, braid_r = evaluate_many(
            [parse_word("t(a) t(b) t(a)"), parse_word("t(b) t(a) t(b)")],
            TORUS,
            convention=convention,
        )
        assert braid_l == braid_r
        assert evaluate(parse_word("(t(a) t(b))^6"), TORUS, convention=convention) == identity(2)


def test_named_definitions():
    defs = {"phi": parse_word("t(a) t(b)"), "psi": parse_word("phi phi'")}
    assert evaluate(parse_word("psi"), TORUS, defs) == identity(2)
    with pytest.raises(UnknownName):
        evaluate(parse_word("chi"), TORUS, defs)
    with pytest.raises(UnknownName):
        evaluate(parse_word("t(z)"), TORUS)


def test_cyclic_definitions_are_rejected():
    defs = {"f": parse_word("g t(a)"), "g": parse_word("f")}
    with pytest.raises(CyclicDefinition):
        evaluate(parse_word("f"), TORUS, defs)


def test_word_names():
    curves, diffeos = word_names(parse_word("t(a) [phi, t(b)^2] psi'"))
    assert curves == {"a", "b"}
    assert diffeos == {"phi", "psi"}


def test_letters_from_word():
    letters = letters_from_word(parse_word("t(a)^2 t(b)'"), TORUS)
    assert [(f.label, f.chirality) for f in letters] == [
        ("a", RIGHT),
        ("a", RIGHT),
        ("b", LEFT),
    ]
    with pytest.raises(ValueError):
        letters_from_word(parse_word("[t(a), t(b)]"), TORUS)


def _elliptic() -> Factorization:
    a = SingularFiber("a", (1, 0))
    b = SingularFiber("b", (0, 1))
    return Factorization(1, (a, b) * 6)


@pytest.mark.parametrize("direction", ["right", "left"])
def test_hurwitz_moves_preserve_the_product(direction):
    factorization = _elliptic()
    moved = hurwitz_move(factorization, 3, direction)
    assert moved.product() == factorization.product() == identity(2)
    assert moved.letters != factorization.letters


def test_hurwitz_move_index_is_checked():
    with pytest.raises(IndexOutOfRange):
        hurwitz_move(_elliptic(), 11)
    with pytest.raises(ValueError):
        hurwitz_move(_elliptic(), 0, "up")


def test_cyclic_shift_keeps_length():
    shifted = cyclic_shift(_elliptic(), 13)
    assert len(shifted) == 12
    assert shifted.letters[0].label == "b"


def test_singular_fiber_rejects_unknown_chirality():
    with pytest.raises(ValueError):
        SingularFiber("a", (1, 0), chirality="up")
