"""Recompute every headline value and compare it with the expected one."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Sequence, Tuple

from sympy import Rational

from app.core.errors import UnknownName
from app.services.bounds import (
    build_fiber_sum_family,
    build_signature_four,
    certify,
    genus_bound_table,
    pullback_cover,
)
from app.services.calibration import CalibrationAttempt, resolve_convention
from app.services.fibration import (
    complement_signature,
    mu_comb,
    signature,
    subtract,
    validate,
)
from app.services.loader import load_fibration, run_pipeline
from app.services.sympl import Convention

logger = logging.getLogger(__name__)

RELATOR_FILES = ("single_twist_nonsep", "single_twist_sep", "twist_square", "twist_fourth", "torus_chain")
STABLE_GENERA = (4, 5)


@dataclass(frozen=True)
class ClaimRow:
    claim: str
    expected: str
    computed: str
    match: bool


@dataclass(frozen=True)
class ReproductionReport:
    """Container holding the convention in force and one row per claim."""

    convention: Convention
    rows: Tuple[ClaimRow, ...]
    attempts: Tuple[CalibrationAttempt, ...] = ()
    convention_source: str = ""

    @property
    def all_match(self) -> bool:
        return all(row.match for row in self.rows)


Claim = Tuple[str, object, Callable[[], object]]


def _run_claim(claim: str, expected: object, compute: Callable[[], object]) -> ClaimRow:
    try:
        computed = compute()
    except Exception as exc:  # noqa: BLE001
        logger.exception("Claim %s failed to compute", claim)
        return ClaimRow(claim, str(expected), f"error: {exc}", False)
    return ClaimRow(claim, str(expected), str(computed), computed == expected)


def _all_checks_pass(name: str, genus: int, convention: Convention) -> bool:
    fibration = load_fibration(name, genus=genus, convention=convention)
    return all(result.passed for result in validate(fibration))


def build_claims(convention: Convention, *, h_max: int = 12) -> List[Claim]:
    def fib(name: str, genus: int | None = None):
        return load_fibration(name, genus=genus, convention=convention)

    claims: List[Claim] = [
        ("single_twist_nonsep.signature", -1, lambda: signature(fib("single_twist_nonsep"))),
        ("single_twist_nonsep.complement", -1, lambda: complement_signature(fib("single_twist_nonsep"))),
        ("single_twist_sep.signature", -1, lambda: signature(fib("single_twist_sep"))),
        ("single_twist_sep.complement", 0, lambda: complement_signature(fib("single_twist_sep"))),
        ("single_twist_sep.mu_comb", (0, 1), lambda: mu_comb(fib("single_twist_sep")).counts),
        ("twist_square.signature", -2, lambda: signature(fib("twist_square"))),
        ("twist_fourth.signature", -4, lambda: signature(fib("twist_fourth"))),
        ("twist_fourth.mu_comb", (4, 0), lambda: mu_comb(fib("twist_fourth")).counts),
        ("torus_chain.signature", -6, lambda: signature(fib("torus_chain"))),
        (
            "torus_chain-twist_square",
            (3, -4, 8),
            lambda: _triple(subtract(fib("torus_chain"), fib("twist_square"), [((8, 9), (0, 1))])),
        ),
        ("elliptic_e1.signature", -8, lambda: signature(fib("elliptic_e1"))),
    ]
    for name in RELATOR_FILES:
        for genus in STABLE_GENERA:
            claims.append(
                (f"{name}.checks(h={genus})", True, lambda n=name, g=genus: _all_checks_pass(n, g, convention))
            )
    for h in (3, 4, 5):
        claims.append(
            (
                f"signature_four(h={h})",
                (h, 9, 4),
                lambda h=h: _cert_triple(build_signature_four(h, convention=convention)),
            )
        )

    seed_summary = _lazy(lambda: run_pipeline("signature_four", genus=3, convention=convention))
    for n in range(1, 6):
        claims.append(
            (
                f"pullback(h=3,n={n})",
                (3, 8 * n + 1, 4 * n),
                lambda n=n: _cert_triple(pullback_cover(certify(seed_summary()), n)),
            )
        )
    for h in range(3, h_max + 1):
        k = h // 3
        claims.append(
            (
                f"fiber_sum_family(h={h})",
                (h, 9, 4 * k),
                lambda h=h: _cert_triple(
                    build_fiber_sum_family(h, convention=convention, seed=seed_summary())
                ),
            )
        )
    table = _lazy(lambda: genus_bound_table(h_max, seed=certify(seed_summary()), convention=convention))
    for h in range(3, h_max + 1):
        expected = Rational(16, h - 1) if h % 2 else Rational(16, h - 2)
        claims.append(
            (
                f"bounds.upper(h={h})",
                str(expected),
                lambda h=h: str(table()[h - 3].upper),
            )
        )
    return claims


def _lazy(factory: Callable[[], object]) -> Callable[[], object]:
    cache: List[object] = []

    def get() -> object:
        if not cache:
            cache.append(factory())
        return cache[0]

    return get


def _triple(summary) -> Tuple[int, int, int]:
    return (summary.base_genus, summary.signature, len(summary.fibers))


def _cert_triple(certificate) -> Tuple[int, int, int]:
    return (certificate.h, certificate.g, certificate.sigma)


def reproduce(
    *,
    convention: Convention | None = None,
    preferred: int | None = None,
    claims: Sequence[str] | None = None,
    h_max: int = 12,
    cache_path: Path | None = None,
) -> ReproductionReport:
    """Calibrate (unless a convention is given) and evaluate the claims.

    Rows follow the order of `claims`, or the claim table when it is None.
    """

    attempts: Tuple[CalibrationAttempt, ...] = ()
    source = "given"
    if convention is None:
        resolved = resolve_convention(path=cache_path, preferred=preferred)
        convention, attempts, source = resolved.convention, resolved.attempts, resolved.source
    logger.info("Reproducing claims (twist_sign=%s)", convention.twist_sign)
    table = {claim: (expected, compute) for claim, expected, compute in build_claims(convention, h_max=h_max)}
    selected = list(table) if claims is None else list(claims)
    unknown = [claim for claim in selected if claim not in table]
    if unknown:
        raise UnknownName(f"Unknown claims: {', '.join(unknown)}")
    rows = [_run_claim(claim, *table[claim]) for claim in selected]
    report = ReproductionReport(convention, tuple(rows), attempts, source)
    logger.info(
        "Reproduction finished: %s/%s claims match",
        sum(row.match for row in rows),
        len(rows),
    )
    return report


__all__ = ["ClaimRow", "ReproductionReport", "build_claims", "reproduce"]
