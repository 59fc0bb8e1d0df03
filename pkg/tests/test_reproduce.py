import pytest

from app.core.errors import UnknownName
from app.services.reproduce import _run_claim, build_claims, reproduce


def test_claim_table_covers_headline_values(convention):
    names = [claim for claim, _, _ in build_claims(convention, h_max=6)]
    assert "single_twist_sep.mu_comb" in names
    assert "torus_chain-twist_square" in names
    assert {f"signature_four(h={h})" for h in (3, 4, 5)} <= set(names)
    assert {f"pullback(h=3,n={n})" for n in range(1, 6)} <= set(names)
    assert {f"bounds.upper(h={h})" for h in range(3, 7)} <= set(names)
    assert len(names) == len(set(names))


def test_selected_claims_match(convention):
    selected = [
        "single_twist_sep.mu_comb",
        "twist_fourth.mu_comb",
        "elliptic_e1.signature",
        "torus_chain-twist_square",
        "pullback(h=3,n=2)",
        "bounds.upper(h=9)",
    ]
    report = reproduce(convention=convention, claims=selected, h_max=9)
    assert [row.claim for row in report.rows] == selected
    assert report.all_match, [row for row in report.rows if not row.match]
    assert report.convention_source == "given"
    assert report.attempts == ()


def test_rows_follow_requested_order(convention):
    selected = ["twist_square.signature", "single_twist_sep.signature"]
    report = reproduce(convention=convention, claims=selected, h_max=3)
    assert [row.claim for row in report.rows] == selected


def test_unknown_claims_are_rejected(convention):
    with pytest.raises(UnknownName, match="no_such_claim"):
        reproduce(convention=convention, claims=["twist_square.signature", "no_such_claim"], h_max=3)


def test_claim_errors_are_reported_not_raised():
    def explode():
        raise RuntimeError("boom")

    row = _run_claim("broken", 1, explode)
    assert row.match is False
    assert row.computed == "error: boom"
    assert _run_claim("ok", (1, 2), lambda: (1, 2)).match
