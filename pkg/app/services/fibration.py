"""Lefschetz fibrations and surface bundles: checks, invariants, subtraction and fiber sums."""

from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, List, Mapping, Sequence, Tuple, Union

from sympy import ImmutableMatrix

from app.core.errors import (
    BaseMismatch,
    CombinatorialMismatch,
    ConstraintViolation,
    IncompatibleGrouping,
    IndexOutOfRange,
    InputParseError,
    MissingZeroSection,
    NotASurfaceBundle,
    RelatorViolation,
    SignatureCalcError,
)
from app.services.atlas import Constraint, CurveAtlas, check_constraints
from app.services.meyer import tau
from app.services.sympl import (
    DEFAULT_CONVENTION,
    Convention,
    commutator,
    identity,
    product,
)
from app.services.words import (
    LEFT,
    Factorization,
    SingularFiber,
    Word,
    evaluate,
    evaluate_many,
    parse_word,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SectionData:
    """Declared section metadata; the boundary-twist power is never computed."""

    exists: bool = True
    self_intersection: int | None = 0
    lifts: str = ""
    note: str = ""

    def __post_init__(self) -> None:
        if not self.exists and self.self_intersection is not None:
            raise ValueError("A missing section cannot carry a self-intersection.")


@dataclass(frozen=True)
class Handle:
    alpha: Word
    beta: Word


@dataclass(frozen=True)
class Fibration:
    """Monodromy description of a genus-h fibration over a genus-g base."""

    name: str
    h: int
    base_genus: int
    atlas: CurveAtlas
    handles: Tuple[Handle, ...] = ()
    fibers: Factorization | None = None
    defs: Mapping[str, Word] = field(default_factory=dict)
    boundaries: Tuple[Word, ...] = ()
    section: SectionData | None = None
    relations: Tuple[Constraint, ...] = ()
    convention: Convention = DEFAULT_CONVENTION

    @property
    def factorization(self) -> Factorization:
        return self.fibers if self.fibers is not None else Factorization(self.h)

    @property
    def singular_count(self) -> int:
        return len(self.factorization)

    @property
    def boundary_count(self) -> int:
        return len(self.boundaries)


@dataclass(frozen=True)
class CombVector:
    """mu_comb: number of singular fibers of each type 0..[h/2]."""

    counts: Tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ProvenanceStep:
    operation: str
    inputs: Tuple[str, ...]
    note: str = ""


@dataclass(frozen=True)
class FibrationSummary:
    """Invariants of a fibration, and the value produced by subtraction and sums.

    `fibers` holds the singular fibers that are still present; a summary
    without fibers describes a smooth surface bundle.
    """

    name: str
    h: int
    base_genus: int
    signature: int
    fibers: Tuple[SingularFiber, ...] = ()
    section: SectionData | None = None
    provenance: Tuple[ProvenanceStep, ...] = ()

    @property
    def is_bundle(self) -> bool:
        return not self.fibers

    @property
    def euler(self) -> int:
        return (2 - 2 * self.h) * (2 - 2 * self.base_genus) + len(self.fibers)

    @property
    def mu_comb(self) -> CombVector:
        return _count_types(self.h, self.fibers)


SurfaceBundle = FibrationSummary
FibrationLike = Union[Fibration, FibrationSummary]
Grouping = Sequence[Tuple[Sequence[int], Sequence[int]]]


# ------------------------------------------------------------------- matrices


def _size(fibration: Fibration) -> int:
    return 2 * fibration.h


def handle_matrices(fibration: Fibration) -> List[Tuple[ImmutableMatrix, ImmutableMatrix]]:
    words: List[Word] = []
    for handle in fibration.handles:
        words.extend([handle.alpha, handle.beta])
    values = evaluate_many(
        words, fibration.atlas, fibration.defs, convention=fibration.convention
    )
    return [(values[i], values[i + 1]) for i in range(0, len(values), 2)]


def boundary_matrices(fibration: Fibration) -> List[ImmutableMatrix]:
    """Matrices around the base boundary: singular letters, then boundary words."""

    letters = fibration.factorization.matrices(fibration.convention)
    extra = evaluate_many(
        list(fibration.boundaries),
        fibration.atlas,
        fibration.defs,
        convention=fibration.convention,
    )
    return [*letters, *extra]


def relator_product(fibration: Fibration) -> ImmutableMatrix:
    kappas = [commutator(a, b) for a, b in handle_matrices(fibration)]
    return product([*kappas, *boundary_matrices(fibration)], size=_size(fibration))


# ----------------------------------------------------------------- validation


def validate(fibration: Fibration) -> List[CheckResult]:
    """Per-check report: relator identity, atlas certification, letters, extra relations."""

    results: List[CheckResult] = []
    try:
        closed = relator_product(fibration) == identity(_size(fibration))
        results.append(
            CheckResult(
                "relator",
                closed,
                "" if closed else "product of commutators and twists is not I in Sp(2h,Z)",
            )
        )
    except SignatureCalcError as exc:
        results.append(CheckResult("relator", False, str(exc)))

    failures = [
        r for r in check_constraints(fibration.atlas, convention=fibration.convention)
        if not r.passed
    ]
    results.append(
        CheckResult(
            "atlas",
            not failures,
            "; ".join(f"{r.constraint.describe()} ({r.detail})" for r in failures),
        )
    )

    bad_types = [
        f"{letter.label} (type {letter.sep_type})"
        for letter in fibration.factorization.letters
        if not 0 <= letter.sep_type <= fibration.h // 2
    ]
    results.append(
        CheckResult(
            "types",
            not bad_types,
            f"types outside 0..{fibration.h // 2}: {', '.join(bad_types)}" if bad_types else "",
        )
    )

    left = [letter.label for letter in fibration.factorization.letters if letter.chirality == LEFT]
    results.append(
        CheckResult(
            "chirality",
            True,
            f"achiral letters (experimental local term): {', '.join(left)}" if left else "",
        )
    )

    for relation in fibration.relations:
        label = f"relation:{relation.name}"
        try:
            lhs = evaluate(
                parse_word(relation.args[0]),
                fibration.atlas,
                fibration.defs,
                convention=fibration.convention,
            )
            rhs = (
                evaluate(
                    parse_word(relation.args[1]),
                    fibration.atlas,
                    fibration.defs,
                    convention=fibration.convention,
                )
                if relation.args[1]
                else identity(_size(fibration))
            )
            results.append(CheckResult(label, lhs == rhs, "" if lhs == rhs else "products differ"))
        except SignatureCalcError as exc:
            results.append(CheckResult(label, False, str(exc)))
    return results


def ensure_valid(fibration: Fibration) -> Fibration:
    for result in validate(fibration):
        if result.passed:
            continue
        if result.name == "relator":
            raise RelatorViolation(f"{fibration.name}: {result.detail}")
        if result.name in ("atlas", "types"):
            raise ConstraintViolation(
                f"{fibration.name}: check {result.name} failed ({result.detail})",
                constraint=result.name,
            )
        raise RelatorViolation(f"{fibration.name}: check {result.name} failed ({result.detail})")
    return fibration


# ----------------------------------------------------------------- invariants


def _count_types(h: int, letters: Iterable[SingularFiber]) -> CombVector:
    counts = [0] * (h // 2 + 1)
    for letter in letters:
        if not 0 <= letter.sep_type <= h // 2:
            raise ConstraintViolation(
                f"{letter.label} has type {letter.sep_type}, outside 0..{h // 2} at genus {h}",
                constraint=f"type {letter.label}",
            )
        counts[letter.sep_type] += 1
    return CombVector(tuple(counts))


def mu_comb(fibration: FibrationLike) -> CombVector:
    if isinstance(fibration, FibrationSummary):
        return fibration.mu_comb
    return _count_types(fibration.h, fibration.factorization.letters)


def signature_boundary(
    handles: Sequence[Tuple[ImmutableMatrix, ImmutableMatrix]],
    gammas: Sequence[ImmutableMatrix],
    *,
    size: int | None = None,
) -> int:
    """Signature of a bundle over a genus-g surface with r boundary circles.

    sigma = sum_i tau(k_i, b_i) - sum_{i>=2} tau(k_1..k_{i-1}, k_i)
            - sum_{j=1}^{r-1} tau(k_1..k_g g_1..g_{j-1}, g_j),   k_i = [a_i, b_i].
    """

    if size is None:
        sample = handles[0][0] if handles else (gammas[0] if gammas else None)
        if sample is None:
            return 0
        size = sample.shape[0]
    kappas = [commutator(a, b) for a, b in handles]
    if product([*kappas, *gammas], size=size) != identity(size):
        raise RelatorViolation("Monodromies do not satisfy prod[a_i,b_i] prod g_j = I.")

    total = sum(tau(kappa, beta) for kappa, (_, beta) in zip(kappas, handles))
    partial = identity(size)
    for index in range(1, len(kappas)):
        partial = partial * kappas[index - 1]
        total -= tau(partial, kappas[index])
    partial = product(kappas, size=size)
    for gamma in gammas[:-1]:
        total -= tau(partial, gamma)
        partial = partial * gamma
    return int(total)


def local_signature(letter: SingularFiber) -> int:
    """0 for a nonseparating fiber, -1 for a separating one; negated when left-handed."""

    value = -1 if letter.sep_type >= 1 else 0
    return -value if letter.chirality == LEFT else value


def complement_signature(fibration: Fibration) -> int:
    """Signature of the complement of the singular-fiber neighborhoods."""

    return signature_boundary(
        handle_matrices(fibration),
        boundary_matrices(fibration),
        size=_size(fibration),
    )


def signature(fibration: Fibration) -> int:
    complement = complement_signature(fibration)
    local = sum(local_signature(letter) for letter in fibration.factorization.letters)
    logger.debug(
        "Signature of %s: complement=%s local=%s", fibration.name, complement, local
    )
    return complement + local


def euler_characteristic(fibration: FibrationLike) -> int:
    if isinstance(fibration, FibrationSummary):
        return fibration.euler
    base_euler = 2 - 2 * fibration.base_genus - fibration.boundary_count
    return (2 - 2 * fibration.h) * base_euler + fibration.singular_count


def summarize(fibration: Fibration) -> FibrationSummary:
    ensure_valid(fibration)
    if fibration.boundaries:
        raise NotASurfaceBundle(
            f"{fibration.name} has a bounded base; only closed bases can be summarized."
        )
    value = signature(fibration)
    return FibrationSummary(
        name=fibration.name,
        h=fibration.h,
        base_genus=fibration.base_genus,
        signature=value,
        fibers=fibration.factorization.letters,
        section=fibration.section,
        provenance=(ProvenanceStep("construction", (fibration.name,), f"signature {value}"),),
    )


def _as_summary(value: FibrationLike) -> FibrationSummary:
    return value if isinstance(value, FibrationSummary) else summarize(value)


# ----------------------------------------------------------------- subtraction

_GROUP_RE = re.compile(r"\[([^\]]*)\]\s*:\s*\[([^\]]*)\]")


def parse_groups(text: str) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Parse `[8,9]:[0,1];[0,1,2,3]:[0,1,2,3]` into index-set pairs."""

    groups = []
    chunks = [chunk.strip() for chunk in text.split(";") if chunk.strip()]
    for chunk in chunks:
        match = _GROUP_RE.fullmatch(chunk)
        if not match:
            raise InputParseError(f"Cannot read grouping {chunk!r}; use [i,j]:[k,l].")
        try:
            left, right = (
                tuple(int(part) for part in side.split(",") if part.strip())
                for side in match.groups()
            )
        except ValueError as exc:
            raise InputParseError(f"Non-integer fiber index in {chunk!r}.") from exc
        groups.append((left, right))
    if not groups:
        raise InputParseError("Empty grouping.")
    return groups


def _same_curve(letters: Sequence[SingularFiber]) -> bool:
    first = letters[0].homology
    negated = tuple(-v for v in first)
    return all(
        letter.homology in (first, negated)
        and letter.sep_type == letters[0].sep_type
        and letter.chirality == letters[0].chirality
        for letter in letters
    )


def _match_group(
    left: Sequence[SingularFiber],
    right: Sequence[SingularFiber],
    assert_isomorphic: bool,
) -> str:
    if len(left) != len(right):
        raise IncompatibleGrouping(
            f"Grouped fibers differ in number ({len(left)} vs {len(right)})."
        )
    signature_left = Counter((f.sep_type, f.chirality) for f in left)
    signature_right = Counter((f.sep_type, f.chirality) for f in right)
    if signature_left != signature_right:
        raise IncompatibleGrouping(
            "Fibers of different type or chirality cannot be paired: "
            f"{sorted(signature_left.items())} vs {sorted(signature_right.items())}"
        )
    if len(left) == 1:
        return "type"
    if [(f.homology, f.sep_type, f.chirality) for f in left] == [
        (f.homology, f.sep_type, f.chirality) for f in right
    ]:
        return "identical"
    if _same_curve(left) and _same_curve(right):
        return "uniform"
    if assert_isomorphic:
        return "asserted"
    raise IncompatibleGrouping(
        "Multi-fiber groups must be identical twist sequences or share a single "
        "vanishing class on each side; pass assert_isomorphic to override."
    )


def _check_indices(groups: Grouping, total: int, side: str) -> List[int]:
    used: List[int] = []
    for indices in (g[0] if side == "first" else g[1] for g in groups):
        if not indices:
            raise IncompatibleGrouping("Empty group in grouping.")
        for index in indices:
            if not 0 <= index < total:
                raise IndexOutOfRange(
                    f"Fiber index {index} out of range for the {side} fibration ({total} fibers)."
                )
            if index in used:
                raise IncompatibleGrouping(f"Fiber {index} of the {side} fibration is grouped twice.")
            used.append(index)
    return used


def subtract(
    minuend: FibrationLike,
    subtrahend: FibrationLike,
    grouping: Grouping,
    *,
    assert_isomorphic: bool = False,
    assert_coinciding_lifts: bool = False,
    name: str | None = None,
) -> FibrationSummary:
    """Glue the complement of matched fiber neighborhoods of X1 to the reversed one of X2.

    Every singular fiber of X2 must be matched; unmatched fibers of X1 remain.
    Base genus g1 + g2 + m - 1, signature sigma1 - sigma2.
    """

    first = _as_summary(minuend)
    second = _as_summary(subtrahend)
    if first.h != second.h:
        raise IncompatibleGrouping(
            f"Fiber genera differ ({first.h} vs {second.h}); subtraction needs equal fibers."
        )
    if not grouping:
        raise IncompatibleGrouping("Subtraction needs at least one group.")
    used_first = _check_indices(grouping, len(first.fibers), "first")
    used_second = _check_indices(grouping, len(second.fibers), "second")
    if len(used_second) != len(second.fibers):
        raise IncompatibleGrouping(
            f"All {len(second.fibers)} singular fibers of {second.name} must be grouped."
        )
    if len(used_first) == len(first.fibers) and first.mu_comb != second.mu_comb:
        raise CombinatorialMismatch(
            f"mu_comb differs: {first.mu_comb.counts} vs {second.mu_comb.counts}"
        )

    rules = []
    for left_idx, right_idx in grouping:
        rules.append(
            _match_group(
                [first.fibers[i] for i in left_idx],
                [second.fibers[i] for i in right_idx],
                assert_isomorphic,
            )
        )

    groups = len(grouping)
    euler_base = (2 - 2 * first.base_genus) + (2 - 2 * second.base_genus) - 2 * groups
    base_genus = (2 - euler_base) // 2
    remaining = tuple(f for i, f in enumerate(first.fibers) if i not in used_first)
    section = _difference_section(first, second, assert_coinciding_lifts)
    label = name or f"{first.name}-{second.name}"
    note = f"{groups} group(s), matched by {', '.join(rules)}"
    if "asserted" in rules:
        note += "; isomorphic neighborhoods asserted by caller"
    step = ProvenanceStep("subtract", (first.name, second.name), note)
    logger.info(
        "Subtracted %s from %s (groups=%s genus=%s signature=%s)",
        second.name,
        first.name,
        groups,
        base_genus,
        first.signature - second.signature,
    )
    return FibrationSummary(
        name=label,
        h=first.h,
        base_genus=base_genus,
        signature=first.signature - second.signature,
        fibers=remaining,
        section=section,
        provenance=(*first.provenance, *second.provenance, step),
    )


def _difference_section(
    first: FibrationSummary,
    second: FibrationSummary,
    assert_coinciding_lifts: bool,
) -> SectionData | None:
    a, b = first.section, second.section
    if not (a and b and a.exists and b.exists):
        return None
    if a.self_intersection is None or b.self_intersection is None:
        return None
    coinciding = bool(a.lifts) and a.lifts == b.lifts
    if not (coinciding or assert_coinciding_lifts):
        logger.info(
            "Section not propagated: lifts %r and %r do not coincide", a.lifts, b.lifts
        )
        return None
    return SectionData(
        exists=True,
        self_intersection=a.self_intersection - b.self_intersection,
        lifts=a.lifts,
        note="difference of sections with coinciding lifts"
        + ("" if coinciding else " (asserted)"),
    )


# ------------------------------------------------------------------ fiber sums


def trivial_bundle(h: int, base_genus: int, *, name: str | None = None) -> FibrationSummary:
    """Product Sigma_h x Sigma_g with its square-zero section."""

    label = name or f"product(S{h}xS{base_genus})"
    return FibrationSummary(
        name=label,
        h=h,
        base_genus=base_genus,
        signature=0,
        section=SectionData(True, 0, lifts="product", note="horizontal section"),
        provenance=(ProvenanceStep("product", (label,), "trivial bundle"),),
    )


def fiber_sum(
    first: FibrationLike,
    second: FibrationLike,
    *,
    section: SectionData | None = None,
    name: str | None = None,
) -> FibrationSummary:
    """Fiberwise connected sum along square-zero sections."""

    a, b = _as_summary(first), _as_summary(second)
    for bundle in (a, b):
        if not bundle.is_bundle:
            raise NotASurfaceBundle(
                f"{bundle.name} still has {len(bundle.fibers)} singular fibers."
            )
        if not (bundle.section and bundle.section.exists and bundle.section.self_intersection == 0):
            raise MissingZeroSection(
                f"{bundle.name} has no declared section of self-intersection zero."
            )
    if a.base_genus != b.base_genus:
        raise BaseMismatch(
            f"Base genera differ ({a.base_genus} vs {b.base_genus})."
        )
    label = name or f"{a.name}#{b.name}"
    return FibrationSummary(
        name=label,
        h=a.h + b.h,
        base_genus=a.base_genus,
        signature=a.signature + b.signature,
        section=section,
        provenance=(
            *a.provenance,
            *b.provenance,
            ProvenanceStep("fiber_sum", (a.name, b.name), "sum along square-zero sections"),
        ),
    )


def with_letters(fibration: Fibration, letters: Sequence[SingularFiber]) -> Fibration:
    """Same fibration with a rearranged factorization (Hurwitz moves, cyclic shifts)."""

    return replace(
        fibration,
        fibers=replace(fibration.factorization, letters=tuple(letters)),
    )


__all__ = [
    "CheckResult",
    "CombVector",
    "Fibration",
    "FibrationSummary",
    "Handle",
    "ProvenanceStep",
    "SectionData",
    "SurfaceBundle",
    "boundary_matrices",
    "complement_signature",
    "ensure_valid",
    "euler_characteristic",
    "fiber_sum",
    "handle_matrices",
    "local_signature",
    "mu_comb",
    "parse_groups",
    "relator_product",
    "signature",
    "signature_boundary",
    "subtract",
    "summarize",
    "trivial_bundle",
    "validate",
    "with_letters",
]
