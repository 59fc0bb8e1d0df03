"""Named curve configurations on the reference fiber and their certification.

Atlas files are line oriented::

    genus 3
    min_genus 3
    include lantern
    curve a4 x2                       # symbolic: 2x2+x3, x1-y2, 0
    curve a6 0,0,0,0,1,0 type=0       # or comma separated coordinates
    curve x 0 type=1 split=2
    constraint disjoint a1 a3
    constraint intersect_once a1 a2
    constraint separating x 2
    relation chain : t(a4) t(a5) == (t(a1) t(a2) t(a3))^4
    relation lantern_closed : t(a1) t(b1)'        # word must be the identity
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field, replace
from functools import reduce
from math import gcd
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Mapping, Sequence, Tuple

from app.core.config import get_settings
from app.core.errors import (
    ConstraintViolation,
    GenusTooSmall,
    ParseError,
    SignatureCalcError,
    UnknownAtlas,
    UnknownCurve,
)
from app.services.sympl import (
    DEFAULT_CONVENTION,
    Convention,
    HomologyVector,
    apply,
    identity,
    pad_vector,
    pairing,
)
from app.services.words import Word, evaluate, parse_word, print_word

logger = logging.getLogger(__name__)

DISJOINT = "disjoint"
INTERSECT_ONCE = "intersect_once"
SEPARATING = "separating"
EQUAL_PRODUCT = "equal_product"
CONSTRAINT_KINDS = (DISJOINT, INTERSECT_ONCE, SEPARATING, EQUAL_PRODUCT)


@dataclass(frozen=True)
class CurveClass:
    """A named simple closed curve: homology class plus separating type.

    `split` is the genus cut off on one side by a separating curve as it is
    embedded; the type at genus h is min(split, h - split).
    """

    name: str
    homology: HomologyVector
    sep_type: int = 0
    split: int = 0

    @property
    def is_separating(self) -> bool:
        return self.sep_type >= 1

    def problems(self, h: int | None = None) -> List[str]:
        """Certification failures; `h` enables the genus-dependent type checks."""

        found: List[str] = []
        if self.sep_type < 0:
            found.append(f"{self.name}: separating type {self.sep_type} is negative")
            return found
        nonzero = any(self.homology)
        if self.is_separating and nonzero:
            found.append(f"{self.name}: separating curve must be null-homologous")
        if not self.is_separating:
            if not nonzero:
                found.append(f"{self.name}: nonseparating curve has zero homology")
            elif reduce(gcd, (abs(v) for v in self.homology)) != 1:
                found.append(f"{self.name}: homology class is not primitive")
        if h is not None and self.is_separating:
            if self.sep_type > h // 2:
                found.append(f"{self.name}: type {self.sep_type} exceeds {h // 2} at genus {h}")
            elif not 1 <= self.split <= h - 1 or min(self.split, h - self.split) != self.sep_type:
                found.append(
                    f"{self.name}: split {self.split} does not give type {self.sep_type} at genus {h}"
                )
        return found


@dataclass(frozen=True)
class Constraint:
    kind: str
    args: Tuple[str, ...]
    name: str = ""

    def describe(self) -> str:
        if self.kind == EQUAL_PRODUCT:
            label = self.name or "relation"
            return f"{label}: {self.args[0]} == {self.args[1]}"
        return " ".join((self.kind, *self.args))


@dataclass(frozen=True)
class ConstraintResult:
    constraint: Constraint
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class CurveAtlas:
    """Curves, intersection constraints and Sp-level relations at genus h."""

    name: str
    h: int
    curves: Mapping[str, CurveClass]
    constraints: Tuple[Constraint, ...] = ()
    min_genus: int = 1
    model_genus: int = 0
    sources: Tuple[str, ...] = field(default=(), compare=False)

    def __contains__(self, name: object) -> bool:
        return name in self.curves

    @property
    def relations(self) -> Tuple[Constraint, ...]:
        return tuple(c for c in self.constraints if c.kind == EQUAL_PRODUCT)

    @property
    def names(self) -> List[str]:
        return sorted(self.curves)

    def curve(self, name: str) -> CurveClass:
        try:
            return self.curves[name]
        except KeyError as exc:
            raise UnknownCurve(f"Atlas {self.name} has no curve named {name!r}.") from exc

    def vector(self, name: str) -> HomologyVector:
        return self.curve(name).homology

    def with_curves(self, extra: Iterable[CurveClass]) -> "CurveAtlas":
        merged = dict(self.curves)
        for curve in extra:
            merged[curve.name] = curve
        return replace(self, curves=merged)


# ------------------------------------------------------------------ parsing

_SYMBOLIC_TERM = re.compile(r"([+-]?)(\d*)([xy])(\d+)")
_SYMBOLIC_FULL = re.compile(r"(?:[+-]?\d*[xy]\d+)+")
_OPTION = re.compile(r"(\w+)=(\S+)")


def parse_homology(text: str, h: int) -> HomologyVector:
    """Parse `x1+2y3`, `0` or `0,1,0,0` into a length-2h vector."""

    compact = text.replace(" ", "")
    if compact == "0":
        return (0,) * (2 * h)
    if "," in compact or re.fullmatch(r"-?\d+", compact):
        values = tuple(int(part) for part in compact.split(","))
        return pad_vector(values, h)
    if not _SYMBOLIC_FULL.fullmatch(compact):
        raise ValueError(f"Cannot read homology class {text!r}.")
    coords = [0] * (2 * h)
    for sign, coeff, letter, index in _SYMBOLIC_TERM.findall(compact):
        position = int(index)
        if not 1 <= position <= h:
            raise ValueError(f"Basis index {letter}{index} exceeds genus {h}.")
        value = int(coeff) if coeff else 1
        if sign == "-":
            value = -value
        coords[2 * (position - 1) + (1 if letter == "y" else 0)] += value
    return tuple(coords)


def _split_relation(body: str) -> Tuple[str, str, str]:
    if ":" not in body:
        raise ValueError("relation needs 'name : word' or 'name : lhs == rhs'")
    name, expr = (part.strip() for part in body.split(":", 1))
    if "==" in expr:
        lhs, rhs = (part.strip() for part in expr.split("==", 1))
    else:
        lhs, rhs = expr, ""
    return name, lhs, rhs


AtlasResolver = Callable[[str], "CurveAtlas"]


def parse_atlas(
    text: str,
    *,
    name: str,
    source: str | None = None,
    resolve: AtlasResolver | None = None,
) -> CurveAtlas:
    """Parse atlas text. `resolve` loads atlases named by `include` lines."""

    genus: int | None = None
    min_genus: int | None = None
    curves: Dict[str, CurveClass] = {}
    constraints: List[Constraint] = []
    sources: List[str] = [source or name]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if keyword == "atlas":
                name = rest or name
            elif keyword == "genus":
                genus = int(rest)
            elif keyword == "min_genus":
                min_genus = int(rest)
            elif keyword == "include":
                if resolve is None:
                    raise ValueError("include is not available here")
                if genus is None:
                    raise ValueError("genus must precede include")
                included = resolve(rest)
                if included.h != genus:
                    included = stabilize(included, genus)
                curves.update(included.curves)
                constraints.extend(included.constraints)
                sources.extend(included.sources)
            elif keyword == "curve":
                if genus is None:
                    raise ValueError("genus must precede curve lines")
                curves_name, _, body = rest.partition(" ")
                fields = body.split()
                if not fields:
                    raise ValueError("curve needs a homology class")
                options = dict(_OPTION.findall(" ".join(fields[1:])))
                sep_type = int(options.get("type", "0"))
                split = int(options.get("split", str(sep_type)))
                curves[curves_name] = CurveClass(
                    name=curves_name,
                    homology=parse_homology(fields[0], genus),
                    sep_type=sep_type,
                    split=split,
                )
            elif keyword == "constraint":
                parts = rest.split()
                if not parts or parts[0] not in CONSTRAINT_KINDS[:3]:
                    raise ValueError(f"unknown constraint {rest!r}")
                needed = 2 if parts[0] == SEPARATING else 3
                if len(parts) < needed:
                    raise ValueError(f"constraint {parts[0]} is missing curve names")
                constraints.append(Constraint(parts[0], tuple(parts[1:])))
            elif keyword == "relation":
                rel_name, lhs, rhs = _split_relation(rest)
                # parse now so syntax errors point at the atlas line
                parse_word(lhs, line=lineno, source=source)
                parse_word(rhs, line=lineno, source=source)
                constraints.append(Constraint(EQUAL_PRODUCT, (lhs, rhs), rel_name))
            else:
                raise ValueError(f"unknown keyword {keyword!r}")
        except SignatureCalcError:
            raise
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno, column=1, source=source) from exc

    if genus is None:
        raise ParseError("atlas declares no genus", line=1, column=1, source=source)
    return CurveAtlas(
        name=name,
        h=genus,
        curves=curves,
        constraints=tuple(constraints),
        min_genus=min_genus if min_genus is not None else genus,
        model_genus=genus,
        sources=tuple(sources),
    )


# ----------------------------------------------------------------- checking


def _pair(atlas: CurveAtlas, left: str, right: str) -> int:
    return pairing(atlas.vector(left), atlas.vector(right))


def _check_one(
    atlas: CurveAtlas, constraint: Constraint, convention: Convention
) -> ConstraintResult:
    kind, args = constraint.kind, constraint.args
    try:
        if kind == DISJOINT:
            value = _pair(atlas, args[0], args[1])
            return ConstraintResult(constraint, value == 0, f"<{args[0]},{args[1]}> = {value}")
        if kind == INTERSECT_ONCE:
            value = _pair(atlas, args[0], args[1])
            return ConstraintResult(
                constraint, abs(value) == 1, f"<{args[0]},{args[1]}> = {value}"
            )
        if kind == SEPARATING:
            curve = atlas.curve(args[0])
            passed = not any(curve.homology) and curve.is_separating
            if len(args) > 1:
                split = int(args[1])
                passed = passed and curve.sep_type == min(split, atlas.h - split)
            return ConstraintResult(constraint, passed, f"type {curve.sep_type}")
        if kind == EQUAL_PRODUCT:
            lhs = evaluate(parse_word(args[0]), atlas, convention=convention)
            rhs = (
                evaluate(parse_word(args[1]), atlas, convention=convention)
                if args[1]
                else identity(2 * atlas.h)
            )
            passed = lhs == rhs
            return ConstraintResult(constraint, passed, "" if passed else "products differ")
    except SignatureCalcError as exc:
        return ConstraintResult(constraint, False, str(exc))
    return ConstraintResult(constraint, False, f"unknown constraint kind {kind}")


def check_constraints(
    atlas: CurveAtlas, *, convention: Convention = DEFAULT_CONVENTION
) -> List[ConstraintResult]:
    """Homology-level certification of every curve, constraint and relation."""

    results: List[ConstraintResult] = []
    for curve in atlas.curves.values():
        issues = curve.problems(atlas.h)
        results.append(
            ConstraintResult(
                Constraint("curve", (curve.name,)), not issues, "; ".join(issues)
            )
        )
    results.extend(_check_one(atlas, c, convention) for c in atlas.constraints)
    return results


def certify(
    atlas: CurveAtlas, *, convention: Convention = DEFAULT_CONVENTION
) -> CurveAtlas:
    """Raise ConstraintViolation on the first failing check."""

    for result in check_constraints(atlas, convention=convention):
        if not result.passed:
            described = result.constraint.describe()
            raise ConstraintViolation(
                f"Atlas {atlas.name} fails {described} ({result.detail})",
                constraint=described,
            )
    return atlas


def curve_class(atlas: CurveAtlas, name: str) -> CurveClass:
    return atlas.curve(name)


def stabilize(
    atlas: CurveAtlas,
    h: int,
    *,
    convention: Convention = DEFAULT_CONVENTION,
    verify: bool = True,
) -> CurveAtlas:
    """Embed the configuration into genus h (zero padding, types recomputed)."""

    if h < atlas.min_genus:
        raise GenusTooSmall(
            f"Atlas {atlas.name} needs genus >= {atlas.min_genus}, got {h}."
        )
    if h == atlas.h:
        return atlas
    curves: Dict[str, CurveClass] = {}
    for curve in atlas.curves.values():
        sep_type = curve.sep_type
        if curve.is_separating:
            sep_type = min(curve.split, h - curve.split)
            if sep_type < 1:
                raise GenusTooSmall(
                    f"Curve {curve.name} of split {curve.split} does not separate at genus {h}."
                )
        curves[curve.name] = replace(
            curve, homology=pad_vector(curve.homology, h), sep_type=sep_type
        )
    stabilized = replace(atlas, h=h, curves=curves)
    if verify:
        certify(stabilized, convention=convention)
    return stabilized


def with_image_curve(
    atlas: CurveAtlas,
    name: str,
    word: Word,
    source_curve: str,
    defs: Mapping[str, Word] | None = None,
    *,
    convention: Convention = DEFAULT_CONVENTION,
) -> CurveAtlas:
    """Add the image of `source_curve` under `word`; the type is inherited."""

    base = atlas.curve(source_curve)
    matrix = evaluate(word, atlas, defs, convention=convention)
    image = CurveClass(
        name=name,
        homology=apply(matrix, base.homology),
        sep_type=base.sep_type,
        split=base.split,
    )
    logger.debug(
        "Derived curve %s = %s(%s) -> %s", name, print_word(word), source_curve, image.homology
    )
    return atlas.with_curves([image])


# ------------------------------------------------------------------ loading


def _atlas_path(name: str, directories: Sequence[Path]) -> Path:
    for directory in directories:
        candidate = directory / f"{name}.atlas"
        if candidate.exists():
            return candidate
    searched = ", ".join(str(d) for d in directories)
    raise UnknownAtlas(f"Unknown atlas {name!r} (searched: {searched}).")


def load_atlas(
    name: str,
    *,
    genus: int | None = None,
    convention: Convention = DEFAULT_CONVENTION,
    directories: Sequence[Path] | None = None,
) -> CurveAtlas:
    """Load, certify and optionally stabilize a named atlas."""

    dirs = list(directories) if directories is not None else get_settings().atlas_dirs
    loading: List[str] = []

    def resolve(atlas_name: str) -> CurveAtlas:
        if atlas_name in loading:
            raise ParseError(f"include cycle through {atlas_name}", source=atlas_name)
        loading.append(atlas_name)
        try:
            path = _atlas_path(atlas_name, dirs)
            return parse_atlas(
                path.read_text(encoding="utf-8"),
                name=atlas_name,
                source=str(path),
                resolve=resolve,
            )
        finally:
            loading.pop()

    atlas = certify(resolve(name), convention=convention)
    logger.debug("Loaded atlas %s (genus %s, %s curves)", name, atlas.h, len(atlas.curves))
    if genus is not None and genus != atlas.h:
        atlas = stabilize(atlas, genus, convention=convention)
    return atlas


def available_atlases(directories: Sequence[Path] | None = None) -> List[str]:
    dirs = list(directories) if directories is not None else get_settings().atlas_dirs
    names = {path.stem for directory in dirs if directory.exists() for path in directory.glob("*.atlas")}
    return sorted(names)


__all__ = [
    "CONSTRAINT_KINDS",
    "Constraint",
    "ConstraintResult",
    "CurveAtlas",
    "CurveClass",
    "available_atlases",
    "certify",
    "check_constraints",
    "curve_class",
    "load_atlas",
    "parse_atlas",
    "parse_homology",
    "stabilize",
    "with_image_curve",
]
