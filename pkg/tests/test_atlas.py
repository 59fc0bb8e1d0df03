import pytest

from app.core.errors import ConstraintViolation, GenusTooSmall, ParseError, UnknownAtlas, UnknownCurve
from app.services.atlas import (
    available_atlases,
    certify,
    check_constraints,
    curve_class,
    load_atlas,
    parse_atlas,
    parse_homology,
    stabilize,
    with_image_curve,
)
from app.services.sympl import Convention, pairing
from app.services.words import parse_word


@pytest.mark.parametrize(
    "text, h, expected",
    [
        ("2x2+x3", 3, (0, 0, 2, 0, 1, 0)),
        ("x1-y2", 2, (1, 0, 0, -1)),
        ("0", 2, (0, 0, 0, 0)),
        ("0,1", 2, (0, 1, 0, 0)),
    ],
)
def test_parse_homology(text, h, expected):
    assert parse_homology(text, h) == expected


@pytest.mark.parametrize("text", ["x4", "z1", "x1+"])
def test_parse_homology_rejects_bad_classes(text):
    with pytest.raises(ValueError):
        parse_homology(text, 3)


@pytest.mark.parametrize(
    "name",
    ["two_holed_torus", "lantern", "lantern_handles", "single_twist", "single_twist_sep", "torus"],
)
@pytest.mark.parametrize("sign", [1, -1])
def test_shipped_atlases_certify_in_both_conventions(name, sign):
    atlas = load_atlas(name, convention=Convention(twist_sign=sign))
    results = check_constraints(atlas, convention=Convention(twist_sign=sign))
    assert all(result.passed for result in results)


def test_include_merges_curves_and_constraints():
    atlas = load_atlas("lantern_handles")
    assert {"x", "y", "a1", "c1", "e"} <= set(atlas.names)
    assert any(c.name == "lantern_x_a3_b1" for c in atlas.relations)
    assert pairing(atlas.vector("c1"), atlas.vector("a2")) in (1, -1)


def test_stabilize_recomputes_separating_types():
    lantern = load_atlas("lantern")
    assert lantern.curve("x").sep_type == 1
    assert stabilize(lantern, 4).curve("x").sep_type == 2
    assert stabilize(lantern, 5).curve("x").sep_type == 2
    assert len(stabilize(lantern, 5).vector("a1")) == 10
    sep = load_atlas("single_twist_sep", genus=6)
    assert sep.curve("a").sep_type == 1


def test_stabilize_below_minimum_genus():
    with pytest.raises(GenusTooSmall):
        load_atlas("lantern", genus=2)


def test_failing_constraint_is_reported():
    text = "genus 1\ncurve a x1\ncurve b x1\nconstraint intersect_once a b\n"
    atlas = parse_atlas(text, name="broken")
    results = check_constraints(atlas)
    assert [r.passed for r in results] == [True, True, False]
    with pytest.raises(ConstraintViolation) as excinfo:
        certify(atlas)
    assert excinfo.value.constraint == "intersect_once a b"


def test_curve_problems_are_reported():
    text = "genus 2\ncurve s x1 type=1\ncurve z 0\ncurve d 2x1\n"
    atlas = parse_atlas(text, name="bad_curves")
    failures = {r.constraint.args[0]: r.detail for r in check_constraints(atlas) if not r.passed}
    assert set(failures) == {"s", "z", "d"}
    assert "primitive" in failures["d"]


@pytest.mark.parametrize(
    "line, fragment",
    [
        ("curve s 0 type=2 split=2", "exceeds 1"),
        ("curve n x2 type=-1", "negative"),
        ("curve s 0 type=1 split=3", "does not give type 1"),
    ],
)
def test_separating_types_are_range_checked(line, fragment):
    atlas = parse_atlas(f"genus 3\ncurve a x1\n{line}\n", name="types")
    failures = [r.detail for r in check_constraints(atlas) if not r.passed]
    assert len(failures) == 1
    assert fragment in failures[0]
    with pytest.raises(ConstraintViolation):
        certify(atlas)


def test_curve_class_reads_type_and_split():
    atlas = parse_atlas("genus 3\ncurve s 0 type=1 split=2\n", name="types")
    curve = curve_class(atlas, "s")
    assert (curve.sep_type, curve.split, curve.is_separating) == (1, 2, True)
    assert curve.problems(3) == []
    assert curve.problems(2) == ["s: split 2 does not give type 1 at genus 2"]
    with pytest.raises(UnknownCurve):
        curve_class(atlas, "t")


def test_relation_failure_is_reported():
    text = "genus 1\ncurve a x1\ncurve b y1\nrelation commute : t(a) t(b) == t(b) t(a)\n"
    results = check_constraints(parse_atlas(text, name="noncommuting"))
    assert results[-1].passed is False
    assert results[-1].detail == "products differ"


@pytest.mark.parametrize(
    "text",
    [
        "curve a x1\n",
        "genus 1\ncurve a\n",
        "genus 1\nconstraint touching a b\n",
        "genus 1\nrelation broken : t(a\n",
        "genus 1\nfrobnicate\n",
    ],
)
def test_parse_atlas_errors(text):
    with pytest.raises(ParseError):
        parse_atlas(text, name="bad")


def test_include_cycle_is_a_parse_error(tmp_path):
    (tmp_path / "first.atlas").write_text("genus 1\ninclude second\n", encoding="utf-8")
    (tmp_path / "second.atlas").write_text("genus 1\ninclude first\n", encoding="utf-8")
    with pytest.raises(ParseError):
        load_atlas("first", directories=[tmp_path])


def test_unknown_atlas_and_curve(tmp_path):
    with pytest.raises(UnknownAtlas):
        load_atlas("missing", directories=[tmp_path])
    with pytest.raises(UnknownCurve):
        load_atlas("torus").curve("c")


def test_with_image_curve_inherits_type():
    atlas = load_atlas("torus")
    moved = with_image_curve(atlas, "c", parse_word("t(b)"), "a")
    assert moved.curve("c").sep_type == 0
    assert pairing(moved.vector("c"), atlas.vector("b")) == pairing(atlas.vector("a"), atlas.vector("b"))
    assert moved.vector("c") != atlas.vector("a")


def test_available_atlases_lists_shipped_files():
    assert {"lantern", "torus", "two_holed_torus"} <= set(available_atlases())
