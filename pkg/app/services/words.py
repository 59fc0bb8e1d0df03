"""Monodromy-word DSL: parsing, canonical printing, evaluation and Hurwitz moves.

Grammar (whitespace-insensitive, `#` starts a comment)::

    word     := term*
    term     := primary postfix*
    primary  := "t(" NAME ")" | NAME | "[" word "," word "]" | "(" word ")"
    postfix  := "'" | "^" ["-"] INT

Postfixes bind tightest, juxtaposition concatenates, parentheses group.
The name ``t`` is reserved for twists.
A first postfix of exponent -1 on a bare ``t(name)`` produces a left-handed
twist letter; every other postfix produces an Inverse or Power node.
"""

from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Mapping, Protocol, Sequence, Tuple, Union

from sympy import ImmutableMatrix

from app.core.errors import (
    CyclicDefinition,
    DimensionMismatch,
    IndexOutOfRange,
    ParseError,
    UnknownName,
)
from app.services.sympl import (
    DEFAULT_CONVENTION,
    Convention,
    HomologyVector,
    apply,
    commutator,
    inverse,
    product,
    transvection,
)

logger = logging.getLogger(__name__)

RIGHT = "right"
LEFT = "left"
CHIRALITIES = (RIGHT, LEFT)
TWIST_KEYWORD = "t"


# --------------------------------------------------------------------------- AST


@dataclass(frozen=True)
class Twist:
    curve: str
    exponent: int = 1

    def __post_init__(self) -> None:
        if self.exponent not in (1, -1):
            raise ValueError(f"Twist exponent must be 1 or -1 (got {self.exponent}).")


@dataclass(frozen=True)
class NamedDiffeo:
    name: str

    def __post_init__(self) -> None:
        if self.name == TWIST_KEYWORD:
            raise ValueError(f"{TWIST_KEYWORD!r} is reserved for twists and cannot name a diffeomorphism.")


@dataclass(frozen=True)
class Inverse:
    word: "Word"


@dataclass(frozen=True)
class Power:
    word: "Word"
    exponent: int

    def __post_init__(self) -> None:
        if self.exponent == 0:
            raise ValueError("Power exponent must be nonzero.")


@dataclass(frozen=True)
class Commutator:
    left: "Word"
    right: "Word"


@dataclass(frozen=True)
class Concat:
    items: Tuple["Word", ...] = ()

    def __post_init__(self) -> None:
        if len(self.items) == 1:
            raise ValueError("Concat holds zero or at least two items.")


Word = Union[Twist, NamedDiffeo, Inverse, Power, Commutator, Concat]


def concat(items: Iterable[Word]) -> Word:
    """Build a Concat, unwrapping the single-item case."""

    collected = tuple(items)
    if len(collected) == 1:
        return collected[0]
    return Concat(collected)


# ------------------------------------------------------------------- tokenizer

_TOKEN_SPEC = [
    ("COMMENT", r"#[^\n]*"),
    ("NEWLINE", r"\n"),
    ("SPACE", r"[ \t\r]+"),
    ("NAME", r"[A-Za-z_][A-Za-z0-9_]*"),
    ("INT", r"\d+"),
    ("MINUS", r"-"),
    ("PLUS", r"\+"),
    ("CARET", r"\^"),
    ("QUOTE", r"'"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("LBRACKET", r"\["),
    ("RBRACKET", r"\]"),
    ("COMMA", r","),
    ("MISMATCH", r"."),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in _TOKEN_SPEC))


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str, *, line: int = 1, source: str | None = None) -> List[Token]:
    tokens: List[Token] = []
    line_start = 0
    for match in _TOKEN_RE.finditer(text):
        kind = match.lastgroup or "MISMATCH"
        column = match.start() - line_start + 1
        if kind == "NEWLINE":
            line += 1
            line_start = match.end()
            continue
        if kind in {"SPACE", "COMMENT"}:
            continue
        if kind == "MISMATCH":
            raise ParseError(
                f"unexpected character {match.group()!r}",
                line=line,
                column=column,
                source=source,
            )
        tokens.append(Token(kind, match.group(), line, column))
    end_column = len(text) - line_start + 1
    tokens.append(Token("EOF", "", line, end_column))
    return tokens


# ---------------------------------------------------------------------- parser


class _Parser:
    _TERM_START = {"NAME", "LBRACKET", "LPAREN"}

    def __init__(self, text: str, *, line: int, source: str | None) -> None:
        self.tokens = tokenize(text, line=line, source=source)
        self.pos = 0
        self.source = source

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def _error(self, message: str, expected: Iterable[str]) -> ParseError:
        token = self.current
        return ParseError(
            message,
            line=token.line,
            column=token.column,
            expected=expected,
            source=self.source,
        )

    def _advance(self) -> Token:
        token = self.current
        self.pos += 1
        return token

    def _expect(self, kind: str, label: str) -> Token:
        if self.current.kind != kind:
            found = self.current.text or "end of input"
            raise self._error(f"unexpected {found!r}", [label])
        return self._advance()

    def parse(self) -> Word:
        word = self.word()
        if self.current.kind != "EOF":
            raise self._error(
                f"unexpected {self.current.text!r}",
                ["t(", "name", "[", "(", "'", "^", "end of input"],
            )
        return word

    def word(self) -> Word:
        items: List[Word] = []
        while self.current.kind in self._TERM_START:
            items.append(self.term())
        return concat(items)

    def term(self) -> Word:
        node, bare_twist = self.primary()
        while self.current.kind in {"QUOTE", "CARET"}:
            quoted = self._advance().kind == "QUOTE"
            exponent = -1 if quoted else self._exponent()
            if bare_twist and exponent == -1:
                node = Twist(node.curve, -node.exponent)
            elif quoted:
                node = Inverse(node)
            else:
                node = Power(node, exponent)
            bare_twist = False
        return node

    def _exponent(self) -> int:
        sign = 1
        if self.current.kind in {"MINUS", "PLUS"}:
            sign = -1 if self._advance().kind == "MINUS" else 1
        digits = self._expect("INT", "integer")
        value = sign * int(digits.text)
        if value == 0:
            raise ParseError(
                "exponent must be nonzero",
                line=digits.line,
                column=digits.column,
                source=self.source,
            )
        return value

    def primary(self) -> Tuple[Word, bool]:
        token = self.current
        if token.kind == "NAME":
            self._advance()
            if token.text == TWIST_KEYWORD:
                self._expect("LPAREN", "(")
                name = self._expect("NAME", "curve name")
                self._expect("RPAREN", ")")
                return Twist(name.text, 1), True
            return NamedDiffeo(token.text), False
        if token.kind == "LBRACKET":
            self._advance()
            left = self.word()
            self._expect("COMMA", ",")
            right = self.word()
            self._expect("RBRACKET", "]")
            return Commutator(left, right), False
        if token.kind == "LPAREN":
            self._advance()
            inner = self.word()
            self._expect("RPAREN", ")")
            return inner, False
        raise self._error(
            f"unexpected {token.text or 'end of input'!r}", ["t(", "name", "[", "("]
        )


def parse_word(text: str, *, line: int = 1, source: str | None = None) -> Word:
    """Parse DSL text into a word AST."""

    return _Parser(text, line=line, source=source).parse()


# --------------------------------------------------------------------- printer


def print_word(word: Word) -> str:
    """Canonical text; parse_word(print_word(w)) == w."""

    if isinstance(word, Concat):
        return " ".join(_print_term(item) for item in word.items)
    return _print_term(word)


def _print_term(word: Word) -> str:
    if isinstance(word, Twist):
        return f"t({word.curve})" if word.exponent == 1 else f"t({word.curve})'"
    if isinstance(word, NamedDiffeo):
        return word.name
    if isinstance(word, Commutator):
        return f"[{print_word(word.left)}, {print_word(word.right)}]"
    if isinstance(word, Concat):
        return f"({print_word(word)})"
    if isinstance(word, Power):
        return f"{_print_operand(word.word, word.exponent == -1)}^{word.exponent}"
    if isinstance(word, Inverse):
        return f"{_print_operand(word.word, True)}'"
    raise TypeError(f"Not a word node: {word!r}")


def _print_operand(word: Word, flips_bare_twist: bool) -> str:
    if isinstance(word, Twist) and word.exponent == 1 and flips_bare_twist:
        return f"(t({word.curve}))"
    return _print_term(word)


# ------------------------------------------------------------------ evaluation


class CurveSource(Protocol):
    """Anything that resolves curve names to homology vectors (atlases do)."""

    h: int

    def __contains__(self, name: object) -> bool: ...

    def vector(self, name: str) -> HomologyVector: ...


class AtlasLike(CurveSource, Protocol):
    """A curve source that also exposes type metadata per curve."""

    def curve(self, name: str): ...


class _Evaluator:
    def __init__(
        self,
        curves: CurveSource,
        defs: Mapping[str, Word],
        convention: Convention,
    ) -> None:
        self.curves = curves
        self.defs = defs
        self.convention = convention
        self.size = 2 * curves.h
        self._cache: Dict[str, ImmutableMatrix] = {}
        self._active: List[str] = []

    def run(self, word: Word) -> ImmutableMatrix:
        if isinstance(word, Twist):
            if word.curve not in self.curves:
                raise UnknownName(f"Unknown curve in word: {word.curve}")
            return transvection(
                self.curves.vector(word.curve),
                word.exponent,
                sign=self.convention.twist_sign,
            )
        if isinstance(word, NamedDiffeo):
            return self._named(word.name)
        if isinstance(word, Inverse):
            return inverse(self.run(word.word))
        if isinstance(word, Power):
            base = self.run(word.word)
            if word.exponent < 0:
                base = inverse(base)
            return product([base] * abs(word.exponent), size=self.size)
        if isinstance(word, Commutator):
            return commutator(self.run(word.left), self.run(word.right))
        if isinstance(word, Concat):
            return product([self.run(item) for item in word.items], size=self.size)
        raise TypeError(f"Not a word node: {word!r}")

    def _named(self, name: str) -> ImmutableMatrix:
        if name in self._cache:
            return self._cache[name]
        if name not in self.defs:
            raise UnknownName(f"Unknown diffeomorphism in word: {name}")
        if name in self._active:
            chain = " -> ".join([*self._active, name])
            raise CyclicDefinition(f"Cyclic definition: {chain}")
        self._active.append(name)
        try:
            value = self.run(self.defs[name])
        finally:
            self._active.pop()
        self._cache[name] = value
        return value


def evaluate(
    word: Word,
    curves: CurveSource,
    defs: Mapping[str, Word] | None = None,
    *,
    convention: Convention = DEFAULT_CONVENTION,
) -> ImmutableMatrix:
    """Homomorphism from words to Sp(2h, Z) under the given convention."""

    return _Evaluator(curves, defs or {}, convention).run(word)


def evaluate_many(
    words: Sequence[Word],
    curves: CurveSource,
    defs: Mapping[str, Word] | None = None,
    *,
    convention: Convention = DEFAULT_CONVENTION,
) -> List[ImmutableMatrix]:
    """Evaluate several words sharing one definition cache."""

    evaluator = _Evaluator(curves, defs or {}, convention)
    return [evaluator.run(word) for word in words]


def word_names(word: Word) -> Tuple[set[str], set[str]]:
    """Return (curve names, diffeomorphism names) referenced by a word."""

    curves: set[str] = set()
    diffeos: set[str] = set()
    stack: List[Word] = [word]
    while stack:
        node = stack.pop()
        if isinstance(node, Twist):
            curves.add(node.curve)
        elif isinstance(node, NamedDiffeo):
            diffeos.add(node.name)
        elif isinstance(node, (Inverse, Power)):
            stack.append(node.word)
        elif isinstance(node, Commutator):
            stack.extend([node.left, node.right])
        elif isinstance(node, Concat):
            stack.extend(node.items)
    return curves, diffeos


# -------------------------------------------------------------- factorizations


@dataclass(frozen=True)
class SingularFiber:
    """One twist letter of a factorization: its vanishing class, type and handedness."""

    label: str
    homology: HomologyVector
    sep_type: int = 0
    chirality: str = RIGHT

    def __post_init__(self) -> None:
        if self.chirality not in CHIRALITIES:
            raise ValueError(f"chirality must be right or left (got {self.chirality!r})")

    @property
    def exponent(self) -> int:
        return 1 if self.chirality == RIGHT else -1

    def matrix(self, convention: Convention = DEFAULT_CONVENTION) -> ImmutableMatrix:
        return transvection(self.homology, self.exponent, sign=convention.twist_sign)


@dataclass(frozen=True)
class Factorization:
    """Ordered singular-fiber letters over a fixed fiber genus."""

    h: int
    letters: Tuple[SingularFiber, ...] = ()
    atlas_name: str = ""

    def __post_init__(self) -> None:
        for letter in self.letters:
            if len(letter.homology) != 2 * self.h:
                raise DimensionMismatch(
                    f"Letter {letter.label} has a vector of length "
                    f"{len(letter.homology)}, expected {2 * self.h}."
                )

    def __len__(self) -> int:
        return len(self.letters)

    def matrices(self, convention: Convention = DEFAULT_CONVENTION) -> List[ImmutableMatrix]:
        return [letter.matrix(convention) for letter in self.letters]

    def product(self, convention: Convention = DEFAULT_CONVENTION) -> ImmutableMatrix:
        return product(self.matrices(convention), size=2 * self.h)

    def type_counts(self) -> Counter:
        return Counter(letter.sep_type for letter in self.letters)


def letters_from_word(word: Word, atlas: AtlasLike) -> List[SingularFiber]:
    """Expand a word made of twists and twist powers into singular-fiber letters."""

    if isinstance(word, Concat):
        letters: List[SingularFiber] = []
        for item in word.items:
            letters.extend(letters_from_word(item, atlas))
        return letters
    if isinstance(word, Twist):
        if word.curve not in atlas:
            raise UnknownName(f"Unknown curve in factorization: {word.curve}")
        curve = atlas.curve(word.curve)
        chirality = RIGHT if word.exponent == 1 else LEFT
        return [SingularFiber(word.curve, curve.homology, curve.sep_type, chirality)]
    if isinstance(word, Power) and isinstance(word.word, Twist):
        base = letters_from_word(word.word, atlas)[0]
        if word.exponent < 0:
            flipped = LEFT if base.chirality == RIGHT else RIGHT
            base = replace(base, chirality=flipped)
        return [base] * abs(word.exponent)
    raise ValueError(
        f"Singular fibers must be twist letters, got {print_word(word)!r}."
    )


def hurwitz_move(
    factorization: Factorization,
    index: int,
    direction: str = "right",
    *,
    convention: Convention = DEFAULT_CONVENTION,
) -> Factorization:
    """Elementary transformation on letters (index, index + 1), 0-based.

    right: (t_i, t_{i+1}) -> (t_{i+1}, t_{i+1}^-1 t_i t_{i+1})
    left:  (t_i, t_{i+1}) -> (t_i t_{i+1} t_i^-1, t_i)
    The conjugated letter keeps its label and type; its class is moved.
    """

    letters = list(factorization.letters)
    if not 0 <= index < len(letters) - 1:
        raise IndexOutOfRange(
            f"Hurwitz move index {index} out of range for {len(letters)} letters."
        )
    first, second = letters[index], letters[index + 1]
    if direction == "right":
        moved = apply(inverse(second.matrix(convention)), first.homology)
        letters[index : index + 2] = [second, replace(first, homology=moved)]
    elif direction == "left":
        moved = apply(first.matrix(convention), second.homology)
        letters[index : index + 2] = [replace(second, homology=moved), first]
    else:
        raise ValueError(f"direction must be 'left' or 'right' (got {direction!r})")
    return replace(factorization, letters=tuple(letters))


def cyclic_shift(factorization: Factorization, steps: int = 1) -> Factorization:
    """Move the first `steps` letters to the end (conjugates the product)."""

    letters = factorization.letters
    if not letters:
        return factorization
    steps %= len(letters)
    return replace(factorization, letters=letters[steps:] + letters[:steps])


__all__ = [
    "CHIRALITIES",
    "Commutator",
    "Concat",
    "CurveSource",
    "Factorization",
    "Inverse",
    "LEFT",
    "NamedDiffeo",
    "Power",
    "RIGHT",
    "SingularFiber",
    "Twist",
    "Word",
    "concat",
    "cyclic_shift",
    "evaluate",
    "evaluate_many",
    "hurwitz_move",
    "letters_from_word",
    "parse_word",
    "print_word",
    "word_names",
]
