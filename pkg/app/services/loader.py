"""Loading fibration (`.fib`) and pipeline (`.pipeline`) files."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

from app.core.config import get_settings
from app.core.errors import (
    ConstraintViolation,
    GenusTooSmall,
    ParseError,
    SignatureCalcError,
    UnknownName,
)
from app.services.atlas import (
    EQUAL_PRODUCT,
    Constraint,
    CurveAtlas,
    load_atlas,
    stabilize,
    with_image_curve,
)
from app.services.fibration import (
    Fibration,
    FibrationSummary,
    Handle,
    SectionData,
    fiber_sum,
    parse_groups,
    subtract,
    summarize,
)
from app.services.sympl import DEFAULT_CONVENTION, Convention
from app.services.words import (
    CHIRALITIES,
    LEFT,
    RIGHT,
    TWIST_KEYWORD,
    Factorization,
    SingularFiber,
    Word,
    letters_from_word,
    parse_word,
)

logger = logging.getLogger(__name__)

_TRAILING_OPTION = re.compile(r"\s+(\w+)=(\S+)\s*$")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass
class _SingularLine:
    word: Word
    lineno: int
    sep_type: int | None = None
    chirality: str | None = None
    count: int = 1


@dataclass
class _Draft:
    """Container holding the parsed lines of a fibration file before assembly."""

    name: str
    source: str
    h: int | None = None
    base_genus: int | None = None
    atlas: str | None = None
    defs: Dict[str, Word] = field(default_factory=dict)
    image_curves: List[Tuple[str, Word, str, int]] = field(default_factory=list)
    handles: List[Handle] = field(default_factory=list)
    singular: List[_SingularLine] = field(default_factory=list)
    boundaries: List[Word] = field(default_factory=list)
    relations: List[Constraint] = field(default_factory=list)
    section: SectionData | None = None


def _split_options(text: str) -> Tuple[str, Dict[str, str]]:
    """Strip trailing `key=value` options from a line body."""

    options: Dict[str, str] = {}
    while True:
        match = _TRAILING_OPTION.search(text)
        if not match:
            break
        options[match.group(1)] = match.group(2)
        text = text[: match.start()]
    return text.strip(), options


def _split_top_level_comma(text: str) -> Tuple[str, str]:
    depth = 0
    for index, char in enumerate(text):
        if char in "([":
            depth += 1
        elif char in ")]":
            depth -= 1
        elif char == "," and depth == 0:
            return text[:index].strip(), text[index + 1 :].strip()
    raise ValueError("handle needs two words separated by a top-level comma")


def _identifier(text: str, what: str) -> str:
    if not _NAME.fullmatch(text):
        raise ValueError(f"invalid {what} name {text!r}")
    return text


def _parse_lines(text: str, *, name: str, source: str) -> _Draft:
    draft = _Draft(name=name, source=source)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()

        def word(body: str) -> Word:
            return parse_word(body, line=lineno, source=source)

        try:
            if keyword == "name":
                draft.name = _identifier(rest, "fibration")
            elif keyword == "fiber_genus":
                draft.h = int(rest)
            elif keyword == "base_genus":
                draft.base_genus = int(rest)
            elif keyword == "atlas":
                draft.atlas = rest
            elif keyword == "def":
                label, _, body = rest.partition("=")
                def_name = _identifier(label.strip(), "definition")
                if def_name == TWIST_KEYWORD:
                    raise ValueError(f"{TWIST_KEYWORD!r} is reserved for twists")
                draft.defs[def_name] = word(body)
            elif keyword == "curve":
                label, _, body = rest.partition("=")
                if "@" not in body:
                    raise ValueError("curve lines read 'curve <name> = <word> @ <curve>'")
                body_word, _, base = body.rpartition("@")
                draft.image_curves.append(
                    (_identifier(label.strip(), "curve"), word(body_word), base.strip(), lineno)
                )
            elif keyword == "handle":
                alpha, beta = _split_top_level_comma(rest)
                draft.handles.append(Handle(word(alpha), word(beta)))
            elif keyword == "singular":
                body, options = _split_options(rest)
                chirality = options.get("chirality")
                if chirality is not None and chirality not in CHIRALITIES:
                    raise ValueError(f"chirality must be right or left (got {chirality!r})")
                count = int(options.get("count", "1"))
                if count < 1:
                    raise ValueError("count must be positive")
                sep_type = int(options["type"]) if "type" in options else None
                if sep_type is not None and sep_type < 0:
                    raise ValueError(f"type must be non-negative (got {sep_type})")
                draft.singular.append(
                    _SingularLine(
                        word=word(body),
                        lineno=lineno,
                        sep_type=sep_type,
                        chirality=chirality,
                        count=count,
                    )
                )
            elif keyword == "boundary":
                draft.boundaries.append(word(rest))
            elif keyword == "relation":
                if ":" not in rest:
                    raise ValueError("relation needs 'name : word' or 'name : lhs == rhs'")
                label, _, expr = rest.partition(":")
                lhs, _, rhs = expr.partition("==")
                word(lhs)
                word(rhs)
                draft.relations.append(
                    Constraint(EQUAL_PRODUCT, (lhs.strip(), rhs.strip()), label.strip())
                )
            elif keyword == "section":
                _, options = _split_options(" " + rest)
                value = options.get("self_intersection")
                draft.section = SectionData(
                    exists=True,
                    self_intersection=int(value) if value is not None else None,
                    lifts=options.get("lifts", ""),
                    note=f"declared in {Path(source).name}",
                )
            else:
                raise ValueError(f"unknown keyword {keyword!r}")
        except SignatureCalcError:
            raise
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno, column=1, source=source) from exc

    for required in ("h", "base_genus", "atlas"):
        if getattr(draft, required) is None:
            label = {"h": "fiber_genus"}.get(required, required)
            raise ParseError(f"missing {label} line", source=source)
    return draft


def _letters(draft: _Draft, atlas: CurveAtlas) -> List[SingularFiber]:
    letters: List[SingularFiber] = []
    for entry in draft.singular:
        try:
            expanded = letters_from_word(entry.word, atlas)
        except ValueError as exc:
            if isinstance(exc, SignatureCalcError):
                raise
            raise ParseError(str(exc), line=entry.lineno, source=draft.source) from exc
        if entry.chirality == LEFT:
            expanded = [
                replace(letter, chirality=LEFT if letter.chirality == RIGHT else RIGHT)
                for letter in expanded
            ]
        if entry.sep_type is not None and entry.sep_type > draft.h // 2:
            raise ConstraintViolation(
                f"{draft.source}:{entry.lineno}: type {entry.sep_type} exceeds "
                f"{draft.h // 2} at fiber genus {draft.h}",
                constraint="type range",
            )
        if entry.sep_type is not None:
            for letter in expanded:
                if letter.sep_type != entry.sep_type and atlas.h == atlas.model_genus:
                    raise ConstraintViolation(
                        f"{draft.source}:{entry.lineno}: {letter.label} is declared "
                        f"type {entry.sep_type} but the atlas gives type {letter.sep_type}",
                        constraint=f"type {letter.label}",
                    )
        letters.extend(expanded * entry.count)
    return letters


def build_fibration(
    text: str,
    *,
    name: str = "fibration",
    source: str | None = None,
    genus: int | None = None,
    convention: Convention = DEFAULT_CONVENTION,
    atlas_dirs: Sequence[Path] | None = None,
) -> Fibration:
    """Parse fibration text and resolve it against its atlas, stabilized to `genus`."""

    label = source or name
    draft = _parse_lines(text, name=name, source=label)
    atlas = load_atlas(draft.atlas, convention=convention, directories=atlas_dirs)
    if atlas.h != draft.h:
        raise ParseError(
            f"fiber_genus {draft.h} does not match atlas {atlas.name} (genus {atlas.h})",
            source=label,
        )
    h = draft.h if genus is None else genus
    if h != atlas.h:
        if h < atlas.min_genus:
            raise GenusTooSmall(f"{draft.name} needs fiber genus >= {atlas.min_genus}, got {h}.")
        atlas = stabilize(atlas, h, convention=convention)

    for curve_name, word, base, lineno in draft.image_curves:
        if base not in atlas:
            raise UnknownName(f"{label}:{lineno}: unknown curve {base!r}")
        atlas = with_image_curve(
            atlas, curve_name, word, base, draft.defs, convention=convention
        )

    fibration = Fibration(
        name=draft.name,
        h=h,
        base_genus=draft.base_genus,
        atlas=atlas,
        handles=tuple(draft.handles),
        fibers=Factorization(h, tuple(_letters(draft, atlas)), atlas.name),
        defs=dict(draft.defs),
        boundaries=tuple(draft.boundaries),
        section=draft.section,
        relations=tuple(draft.relations),
        convention=convention,
    )
    if len(fibration.handles) != fibration.base_genus:
        raise ParseError(
            f"{fibration.base_genus} handles expected, found {len(fibration.handles)}",
            source=label,
        )
    logger.debug(
        "Loaded fibration %s (h=%s, g=%s, s=%s)",
        fibration.name,
        fibration.h,
        fibration.base_genus,
        fibration.singular_count,
    )
    return fibration


def resolve_fibration_path(name_or_path: str | Path) -> Path:
    """A filesystem path, or the name of a shipped fibration."""

    path = Path(name_or_path)
    if path.exists():
        return path
    shipped = get_settings().fibration_dir / f"{Path(name_or_path).stem}.fib"
    if shipped.exists():
        return shipped
    raise UnknownName(f"No fibration file {str(name_or_path)!r}.")


def load_fibration(
    name_or_path: str | Path,
    *,
    genus: int | None = None,
    convention: Convention = DEFAULT_CONVENTION,
) -> Fibration:
    path = resolve_fibration_path(name_or_path)
    return build_fibration(
        path.read_text(encoding="utf-8"),
        name=path.stem,
        source=str(path),
        genus=genus,
        convention=convention,
    )


# ------------------------------------------------------------------ pipelines

_SUBTRACT = re.compile(r"(\w+)\s*=\s*(\w+)\s*-\s*(\w+)\s+groups=(\S+)((?:\s+\w+)*)\s*$")
_FIBERSUM = re.compile(r"(\w+)\s*=\s*(\w+)\s*\+\s*(\w+)\s*$")
_FLAGS = {"assert_isomorphic", "assert_coinciding_lifts"}


def resolve_pipeline_path(name_or_path: str | Path) -> Path:
    path = Path(name_or_path)
    if path.exists():
        return path
    shipped = get_settings().pipeline_dir / f"{path.stem}.pipeline"
    if shipped.exists():
        return shipped
    raise UnknownName(f"No pipeline file {str(name_or_path)!r}.")


def run_pipeline_text(
    text: str,
    *,
    source: str = "pipeline",
    genus: int | None = None,
    convention: Convention = DEFAULT_CONVENTION,
) -> FibrationSummary:
    """Run `load`/`subtract`/`fibersum` steps and return the `result` value."""

    values: Dict[str, Fibration | FibrationSummary] = {}
    result: str | None = None

    def lookup(key: str, lineno: int) -> Fibration | FibrationSummary:
        if key not in values:
            raise ParseError(f"unknown pipeline value {key!r}", line=lineno, source=source)
        return values[key]

    logger.info("Running pipeline %s (genus=%s)", source, genus)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()
        if keyword == "load":
            parts = rest.split()
            if len(parts) != 2:
                raise ParseError("load needs a value name and a fibration", line=lineno, source=source)
            values[parts[0]] = load_fibration(parts[1], genus=genus, convention=convention)
        elif keyword == "subtract":
            match = _SUBTRACT.fullmatch(rest)
            if not match:
                raise ParseError(
                    "subtract reads 'Y = A - B groups=[..]:[..]'", line=lineno, source=source
                )
            target, left, right, groups, flags = match.groups()
            flag_set = set(flags.split())
            unknown = flag_set - _FLAGS
            if unknown:
                raise ParseError(f"unknown flags {sorted(unknown)}", line=lineno, source=source)
            values[target] = subtract(
                lookup(left, lineno),
                lookup(right, lineno),
                parse_groups(groups),
                assert_isomorphic="assert_isomorphic" in flag_set,
                assert_coinciding_lifts="assert_coinciding_lifts" in flag_set,
                name=target,
            )
        elif keyword == "fibersum":
            match = _FIBERSUM.fullmatch(rest)
            if not match:
                raise ParseError("fibersum reads 'Z = A + B'", line=lineno, source=source)
            target, left, right = match.groups()
            values[target] = fiber_sum(lookup(left, lineno), lookup(right, lineno), name=target)
        elif keyword == "result":
            result = rest
            lookup(result, lineno)
        else:
            raise ParseError(f"unknown keyword {keyword!r}", line=lineno, source=source)

    if result is None:
        raise ParseError("pipeline declares no result", source=source)
    value = values[result]
    summary = value if isinstance(value, FibrationSummary) else summarize(value)
    logger.info(
        "Pipeline %s finished: h=%s g=%s signature=%s",
        source,
        summary.h,
        summary.base_genus,
        summary.signature,
    )
    return summary


def run_pipeline(
    name_or_path: str | Path,
    *,
    genus: int | None = None,
    convention: Convention = DEFAULT_CONVENTION,
) -> FibrationSummary:
    path = resolve_pipeline_path(name_or_path)
    return run_pipeline_text(
        path.read_text(encoding="utf-8"),
        source=str(path),
        genus=genus,
        convention=convention,
    )


__all__ = [
    "build_fibration",
    "load_fibration",
    "resolve_fibration_path",
    "resolve_pipeline_path",
    "run_pipeline",
    "run_pipeline_text",
]
