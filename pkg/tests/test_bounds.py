import pytest
from sympy import Rational

from app.core.errors import ConventionViolation, GenusTooSmall, NotASurfaceBundle
from app.services.bounds import (
    HISTORICAL_SLOPE,
    AsymptoticBound,
    BundleCertificate,
    build_fiber_sum_family,
    build_signature_four,
    certify,
    even_genus_bound,
    even_genus_step,
    fiberwise_cover,
    genus_bound_table,
    kodaira_bound,
    lower_bound,
    pullback_cover,
    residue_bound,
    stabilize_certificate,
)
from app.services.fibration import FibrationSummary, ProvenanceStep, SectionData
from app.services.words import SingularFiber

SEED = BundleCertificate(3, 9, 4, chain=(ProvenanceStep("subtract", ("X2", "P")),))


def _seed_summary() -> FibrationSummary:
    return FibrationSummary(
        "Y",
        3,
        9,
        4,
        section=SectionData(True, 0, lifts="boundary_twists"),
        provenance=SEED.chain,
    )


def test_lower_and_comparison_bounds():
    assert lower_bound(3) == 1
    assert lower_bound(9) == Rational(1, 4)
    assert kodaira_bound(3) == Rational(22, 5)
    with pytest.raises(GenusTooSmall):
        lower_bound(1)


def test_certificate_invariants():
    assert SEED.n == 1
    assert SEED.identifier == "subtract(h=3,g=9,sigma=4)"
    assert BundleCertificate(2, 0, 0).identifier == "declared(h=2,g=0,sigma=0)"
    with pytest.raises(ConventionViolation):
        BundleCertificate(3, 9, 2)
    with pytest.raises(ConventionViolation, match="violates g >= 2; check the twist sign"):
        BundleCertificate(3, 1, 4)
    with pytest.raises(ConventionViolation):
        BundleCertificate(1, 9, 4)


def test_certify_needs_a_bundle():
    with_fiber = FibrationSummary("X", 3, 1, -6, fibers=(SingularFiber("a", (1, 0, 0, 0, 0, 0)),))
    with pytest.raises(NotASurfaceBundle):
        certify(with_fiber)
    assert certify(_seed_summary()) == BundleCertificate(3, 9, 4, chain=SEED.chain)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_pullback_covers(n):
    cover = pullback_cover(SEED, n)
    assert (cover.h, cover.g, cover.sigma) == (3, 8 * n + 1, 4 * n)
    assert cover.chain[:-1] == SEED.chain
    assert cover.chain[-1].operation == "pullback"
    assert cover.chain[-1].inputs == (SEED.identifier,)
    assert cover.identifier == f"pullback(h=3,g={8 * n + 1},sigma={4 * n})"


def test_pullback_degree_must_be_positive():
    with pytest.raises(ValueError):
        pullback_cover(SEED, 0)


@pytest.mark.parametrize("h", range(3, 13))
def test_fiber_sum_family(h):
    certificate = build_fiber_sum_family(h, seed=_seed_summary())
    assert (certificate.h, certificate.g, certificate.sigma) == (h, 9, 4 * (h // 3))


def test_fiber_sum_family_needs_genus_three():
    with pytest.raises(GenusTooSmall):
        build_fiber_sum_family(2, seed=_seed_summary())


@pytest.mark.parametrize("d, expected", [(1, 8), (2, 4), (3, Rational(8, 3)), (4, 2)])
def test_fiberwise_cover(d, expected):
    bound = fiberwise_cover(SEED, d)
    assert bound.h == 2 * d + 1
    assert bound.upper == expected
    assert bound.upper == Rational(16, bound.h - 1)


def test_fiberwise_cover_inputs():
    with pytest.raises(ValueError):
        fiberwise_cover(BundleCertificate(4, 9, 4), 1)
    with pytest.raises(ValueError):
        fiberwise_cover(SEED, 0)
    with pytest.raises(ValueError):
        fiberwise_cover(BundleCertificate(3, 0, 0), 1)


@pytest.mark.parametrize("h", [4, 6, 8, 12])
def test_even_genus_step(h):
    certificate = even_genus_step(h)
    assert (certificate.h, certificate.g, certificate.sigma) == (h, 9, 2 * (h - 2))
    assert certificate.assumptions
    assert even_genus_bound(h).upper == Rational(16, h - 2)


def test_even_genus_step_rejects_odd_genus():
    with pytest.raises(ValueError):
        even_genus_step(5)
    with pytest.raises(ValueError):
        even_genus_step(4, 0)


def test_residue_bound():
    assert residue_bound(3).upper == 8
    assert residue_bound(7).upper == 4
    assert residue_bound(11).upper == Rational(8, 3)


def test_upper_bound_cannot_undercut_lower_bound():
    with pytest.raises(ConventionViolation):
        AsymptoticBound(3, Rational(1, 2), "made_up")


def test_genus_bound_table():
    rows = genus_bound_table(12, seed=SEED)
    assert [row.h for row in rows] == list(range(3, 13))
    for row in rows:
        expected = Rational(16, row.h - 1) if row.h % 2 else Rational(16, row.h - 2)
        assert row.upper == expected
        assert row.lower == Rational(2, row.h - 1) <= row.upper
        assert row.historical == HISTORICAL_SLOPE
        assert row.g_at_one == 9
        assert row.witnesses[-1] == stabilize_certificate(SEED, row.h).identifier
    assert rows[0].kodaira == Rational(22, 5)
    assert rows[9 - 3].upper == 2
    assert rows[0].witnesses[-1] == SEED.identifier
    assert rows[1].witnesses[-1] == "fiber_sum(h=4,g=9,sigma=4)"
    with pytest.raises(GenusTooSmall):
        genus_bound_table(2, seed=SEED)
    with pytest.raises(ValueError):
        genus_bound_table(5, seed=pullback_cover(SEED, 2))


def test_stabilized_certificate_keeps_base_and_signature():
    assert stabilize_certificate(SEED, 3) is SEED
    lifted = stabilize_certificate(SEED, 7)
    assert (lifted.h, lifted.g, lifted.sigma) == (7, 9, 4)
    assert lifted.chain[-1].operation == "fiber_sum"
    assert lifted.chain[-1].inputs == (SEED.identifier, "product(h=4,g=9)")
    assert lifted.assumptions
    with pytest.raises(GenusTooSmall):
        stabilize_certificate(lifted, 5)


def test_signature_four_certificate(convention):
    certificate = build_signature_four(3, convention=convention)
    assert (certificate.h, certificate.g, certificate.sigma) == (3, 9, 4)
    assert certificate.identifier == "subtract(h=3,g=9,sigma=4)"
    with pytest.raises(GenusTooSmall):
        build_signature_four(2, convention=convention)
