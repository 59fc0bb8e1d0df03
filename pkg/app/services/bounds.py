"""Certified bundle constructions and bounds on the genus function g_h(n).

g_h(n) is the least base genus of a genus-h surface bundle with signature 4n;
G_h = lim g_h(n)/n. Every value here is exact (sympy Rational).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Tuple

from sympy import Rational

from app.core.errors import ConventionViolation, GenusTooSmall, NotASurfaceBundle
from app.services.fibration import (
    FibrationSummary,
    ProvenanceStep,
    SectionData,
    fiber_sum,
    trivial_bundle,
)
from app.services.loader import run_pipeline
from app.services.sympl import DEFAULT_CONVENTION, Convention

logger = logging.getLogger(__name__)

SIGNATURE_FOUR_PIPELINE = "signature_four"
HISTORICAL_SLOPE = Rational(110)


def lower_bound(h: int) -> Rational:
    """g_h(n) >= 2|n|/(h-1) + 1, so G_h >= 2/(h-1)."""

    if h < 2:
        raise GenusTooSmall(f"The genus bound needs h >= 2 (got {h}).")
    return Rational(2, h - 1)


def kodaira_bound(h: int) -> Rational:
    return Rational(44, 5 * (h - 1))


@dataclass(frozen=True)
class BundleCertificate:
    """A surface bundle known to exist: fiber genus, base genus, signature, and how."""

    h: int
    g: int
    sigma: int
    chain: Tuple[ProvenanceStep, ...] = ()
    assumptions: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.sigma % 4:
            raise ConventionViolation(
                f"Signature {self.sigma} of a surface bundle must be divisible by 4."
            )
        if self.sigma == 0:
            return
        if self.h < 2:
            raise ConventionViolation(
                f"A genus-{self.h} bundle cannot have signature {self.sigma}."
            )
        minimum = Rational(2 * abs(self.n), self.h - 1) + 1
        if self.g < minimum:
            raise ConventionViolation(
                f"(h={self.h}, g={self.g}, sigma={self.sigma}) violates g >= {minimum}; "
                "check the twist sign."
            )

    @property
    def n(self) -> int:
        return self.sigma // 4

    @property
    def identifier(self) -> str:
        operation = self.chain[-1].operation if self.chain else "declared"
        return f"{operation}(h={self.h},g={self.g},sigma={self.sigma})"


@dataclass(frozen=True)
class AsymptoticBound:
    """Container holding an exact upper bound on G_h and the rule that produced it."""

    h: int
    upper: Rational
    source: str
    constructive: bool = True
    witnesses: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.upper < lower_bound(self.h):
            raise ConventionViolation(
                f"Upper bound {self.upper} on G_{self.h} is below the lower bound "
                f"{lower_bound(self.h)}."
            )


def certify(summary: FibrationSummary) -> BundleCertificate:
    if not summary.is_bundle:
        raise NotASurfaceBundle(
            f"{summary.name} still has {len(summary.fibers)} singular fibers."
        )
    return BundleCertificate(
        h=summary.h,
        g=summary.base_genus,
        sigma=summary.signature,
        chain=summary.provenance,
    )


def build_signature_four(
    h: int, *, convention: Convention = DEFAULT_CONVENTION
) -> BundleCertificate:
    """Run the shipped subtraction pipeline at fiber genus h: (h, 9, 4)."""

    if h < 3:
        raise GenusTooSmall(f"The signature-four construction needs h >= 3 (got {h}).")
    return certify(_signature_four_summary(h, convention))


def _signature_four_summary(h: int, convention: Convention) -> FibrationSummary:
    summary = run_pipeline(SIGNATURE_FOUR_PIPELINE, genus=h, convention=convention)
    if not summary.is_bundle:
        raise NotASurfaceBundle(f"Pipeline result {summary.name} is not a surface bundle.")
    return summary


def pullback_cover(certificate: BundleCertificate, n: int) -> BundleCertificate:
    """Pull back along an unramified degree-n cover of the base."""

    if n < 1:
        raise ValueError(f"Cover degree must be positive (got {n}).")
    return BundleCertificate(
        h=certificate.h,
        g=n * (certificate.g - 1) + 1,
        sigma=n * certificate.sigma,
        chain=(
            *certificate.chain,
            ProvenanceStep("pullback", (certificate.identifier,), f"degree {n} base cover"),
        ),
        assumptions=certificate.assumptions,
    )


def stabilize_certificate(certificate: BundleCertificate, h: int) -> BundleCertificate:
    """Fiber sum with Sigma_{h-h0} x Sigma_g along square-zero sections; g and sigma are kept."""

    if h < certificate.h:
        raise GenusTooSmall(f"Cannot lower the fiber genus from {certificate.h} to {h}.")
    if h == certificate.h:
        return certificate
    product_name = f"product(h={h - certificate.h},g={certificate.g})"
    return BundleCertificate(
        h=h,
        g=certificate.g,
        sigma=certificate.sigma,
        chain=(
            *certificate.chain,
            ProvenanceStep("fiber_sum", (certificate.identifier, product_name), "sum with a product bundle"),
        ),
        assumptions=(
            *certificate.assumptions,
            f"{certificate.identifier} carries a square-zero section",
        ),
    )


def build_fiber_sum_family(
    h: int,
    *,
    convention: Convention = DEFAULT_CONVENTION,
    seed: FibrationSummary | None = None,
) -> BundleCertificate:
    """h = 3k + l: k copies of the genus-3 signature-four bundle plus Sigma_l x Sigma_9."""

    if h < 3:
        raise GenusTooSmall(f"The fiber-sum family needs h >= 3 (got {h}).")
    k, l = divmod(h, 3)
    block = seed or _signature_four_summary(3, convention)
    # a square-zero section has a disjoint parallel copy, so sums can continue
    parallel = SectionData(True, 0, lifts="parallel", note="parallel copy of a square-zero section")
    total = block
    for _ in range(k - 1):
        total = fiber_sum(total, block, section=parallel, name=f"{total.name}#{block.name}")
    if l:
        total = fiber_sum(total, trivial_bundle(l, total.base_genus), section=parallel)
    logger.info("Fiber-sum family at h=%s: k=%s l=%s signature=%s", h, k, l, total.signature)
    return certify(total)


def fiberwise_cover(certificate: BundleCertificate, d: int) -> AsymptoticBound:
    """G_{2d+1} <= G_3 / d, with G_3 read off the genus-3 certificate's pullbacks."""

    if certificate.h != 3:
        raise ValueError(f"Fiberwise covers start from fiber genus 3 (got {certificate.h}).")
    if d < 1:
        raise ValueError(f"Cover degree must be positive (got {d}).")
    if certificate.n <= 0:
        raise ValueError("The genus-3 certificate needs positive signature.")
    slope = Rational(certificate.g - 1, certificate.n)
    return AsymptoticBound(
        h=2 * d + 1,
        upper=slope / d,
        source="fiberwise_cover",
        witnesses=(certificate.identifier, f"fiberwise_cover(d={d})"),
    )


def residue_bound(h: int) -> AsymptoticBound:
    """G_h <= 24/(h - l), l = h mod 3, from pullbacks of the fiber-sum family."""

    if h < 3:
        raise GenusTooSmall(f"The residue bound needs h >= 3 (got {h}).")
    l = h % 3
    return AsymptoticBound(
        h=h,
        upper=Rational(24, h - l),
        source="fiber_sum_family",
        witnesses=(f"fiber_sum_family(h={h})",),
    )


def even_genus_step(h: int, n: int = 1) -> BundleCertificate:
    """Even h: Z (fiber h-1, base 8n+1, sigma 2n(h-2)) summed with Sigma_1 x Sigma_{8n+1}."""

    if h < 4 or h % 2:
        raise ValueError(f"The even-genus step needs an even h >= 4 (got {h}).")
    if n < 1:
        raise ValueError(f"n must be positive (got {n}).")
    base = 8 * n + 1
    sigma = 2 * n * (h - 2)
    assumption = (
        f"Z (fiber genus {h - 1} over Sigma_{base}) comes from a fiberwise cover "
        "whose base pullback degree is left unspecified"
    )
    z = FibrationSummary(
        name=f"Z(h={h - 1},n={n})",
        h=h - 1,
        base_genus=base,
        signature=sigma,
        section=SectionData(True, 0, lifts="parallel", note="square-zero section after covering"),
        provenance=(
            ProvenanceStep(
                "fiberwise_cover",
                ("signature_four(h=3)", f"pullback(n={n})"),
                f"degree {(h - 2) // 2} fiberwise cover",
            ),
        ),
    )
    total = fiber_sum(z, trivial_bundle(1, base))
    certificate = certify(total)
    return BundleCertificate(
        h=certificate.h,
        g=certificate.g,
        sigma=certificate.sigma,
        chain=certificate.chain,
        assumptions=(assumption,),
    )


def even_genus_bound(h: int) -> AsymptoticBound:
    certificate = even_genus_step(h, 1)
    return AsymptoticBound(
        h=h,
        upper=Rational(certificate.g - 1, certificate.n),
        source="even_genus_step",
        witnesses=(certificate.identifier,),
    )


@dataclass(frozen=True)
class BoundRow:
    """Container holding one table row; kodaira is a comparison value only."""

    h: int
    lower: Rational
    upper: Rational
    source: str
    residue: Rational
    historical: Rational
    kodaira: Rational
    g_at_one: int
    witnesses: Tuple[str, ...]


def genus_bound_table(
    h_max: int,
    *,
    seed: BundleCertificate | None = None,
    convention: Convention = DEFAULT_CONVENTION,
) -> List[BoundRow]:
    """Rows h = 3..h_max; `seed` is the genus-3 signature-four certificate."""

    if h_max < 3:
        raise GenusTooSmall(f"The table starts at h = 3 (got h_max={h_max}).")
    seed = seed or build_signature_four(3, convention=convention)
    if seed.h != 3 or seed.n != 1:
        raise ValueError(f"The table needs a genus-3 signature-four seed (got {seed.identifier}).")
    rows: List[BoundRow] = []
    for h in range(3, h_max + 1):
        if h % 2:
            bound = fiberwise_cover(seed, (h - 1) // 2)
        else:
            bound = even_genus_bound(h)
        upper = min(bound.upper, HISTORICAL_SLOPE)
        signature_four = stabilize_certificate(seed, h)
        rows.append(
            BoundRow(
                h=h,
                lower=lower_bound(h),
                upper=upper,
                source=bound.source,
                residue=residue_bound(h).upper,
                historical=HISTORICAL_SLOPE,
                kodaira=kodaira_bound(h),
                g_at_one=signature_four.g,
                witnesses=(*bound.witnesses, signature_four.identifier),
            )
        )
    return rows


__all__ = [
    "AsymptoticBound",
    "BoundRow",
    "BundleCertificate",
    "HISTORICAL_SLOPE",
    "build_fiber_sum_family",
    "build_signature_four",
    "certify",
    "even_genus_bound",
    "even_genus_step",
    "fiberwise_cover",
    "genus_bound_table",
    "kodaira_bound",
    "lower_bound",
    "pullback_cover",
    "residue_bound",
    "stabilize_certificate",
]
