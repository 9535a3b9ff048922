from fractions import Fraction

import pytest

from dissect.dissection import (
    Dissection,
    Placement,
    PlacementError,
    Polygon,
    PolygonError,
    SchemaError,
    area,
    check_corner_lemmas,
    classify_target,
    congruent,
    dump_dissection,
    identity_dissection,
    load_dissection,
    square_S,
    triangle_T,
    verify_tiling,
)
from dissect.geom import Point
from dissect.kernel import sign, sqrt

from helpers import IDENTITY, FIXTURES, chord_cut_triangle, fixture, poly, pts, same_in_both, two_squares


def violations(findings):
    return [f for f in findings if f.violation]


class TestPolygon:
    def test_area_of_triangle(self):
        assert sign(area(triangle_T()) - sqrt(3)) == 0

    def test_area_of_square(self):
        assert sign(area(square_S()) - sqrt(3)) == 0

    def test_unit_square(self):
        assert area(poly((0, 0), (1, 0), (1, 1), (0, 1))) == 1

    def test_clockwise_rejected(self):
        with pytest.raises(PolygonError):
            poly((0, 0), (0, 1), (1, 0))

    def test_straight_corner_rejected(self):
        with pytest.raises(PolygonError):
            poly((0, 0), (1, 0), (2, 0), (1, 1))

    def test_self_intersection_rejected_with_ref(self):
        with pytest.raises(PolygonError) as info:
            poly((0, 0), (1, 0), (0, 1), (1, 1))
        assert info.value.ref == "Lemma geom-simple"

    def test_pinch_point_rejected(self):
        with pytest.raises(PolygonError):
            poly((0, 0), (2, 0), (1, 1), (2, 2), (0, 2), (1, 1))

    def test_classify_target(self):
        assert classify_target(triangle_T()) == "T"
        assert classify_target(square_S()) == "S"
        assert classify_target(poly((0, 0), (1, 0), (1, 1), (0, 1))) == "S"
        assert classify_target(poly((0, 0), (2, 0), (2, 1), (0, 1))) is None

    def test_containment_is_closed(self):
        s = poly((0, 0), (1, 0), (1, 1), (0, 1))
        assert s.contains(Point(0, 0))
        assert s.contains(Point(Fraction(1, 2), Fraction(1, 2)))
        assert not s.contains(Point(2, 0))
        assert s.on_boundary(Point(1, Fraction(1, 3)))


class TestPlacement:
    def test_non_unit_rotation_rejected(self):
        with pytest.raises(PlacementError):
            Placement(1, 1)

    def test_irrational_unit_rotation_accepted(self):
        p = Placement(Fraction(1, 2), sqrt(3) / 2)
        assert p.apply(Point(2, 0)) == Point(1, sqrt(3))

    def test_quarter_turn(self):
        assert Placement(0, 1, 5, 0).apply(Point(1, 0)) == Point(5, 1)


class TestCongruent:
    def test_rotated_copy(self):
        t = triangle_T()
        moved = Placement(0, 1, 3, 4).apply_polygon(t)
        assert congruent(t, moved)

    def test_mirror_is_not_congruent(self):
        a = poly((0, 0), (2, 0), (0, 1))
        b = poly((0, 0), (2, 0), (2, 1))
        assert not congruent(a, b)

    def test_different_shapes(self):
        assert not congruent(triangle_T(), square_S())

    def test_dudeney_placements_agree(self):
        d = fixture("dudeney")
        for a, b in zip(d.placed("P"), d.placed("Pprime")):
            assert congruent(a, b)


class TestVerifyTiling:
    @pytest.mark.parametrize("which", ["P", "Pprime"])
    def test_dudeney(self, which):
        report = verify_tiling(fixture("dudeney"), which)
        assert report.ok and report.violations == []

    def test_identity(self):
        assert verify_tiling(identity_dissection(triangle_T()), "P").ok

    def test_duplicate_piece_overlaps(self):
        s = square_S()
        report = verify_tiling(same_in_both([s, s], s), "P")
        assert not report.ok
        kinds = {v.kind for v in report.violations}
        assert "overlap" in kinds
        assert all(v.ref for v in report.violations)

    def test_missing_piece_leaves_gap(self):
        d = two_squares()
        broken = Dissection(d.pieces[:1], d.targets, {k: v[:1] for k, v in d.placements.items()})
        kinds = {v.kind for v in verify_tiling(broken, "P").violations}
        assert "gap" in kinds

    def test_piece_outside_target_leaks(self):
        d = two_squares()
        moved = Dissection(d.pieces, d.targets, {"P": [IDENTITY, Placement(1, 0, 1, 0)], "Pprime": d.placements["Pprime"]})
        kinds = {v.kind for v in verify_tiling(moved, "P").violations}
        assert "boundary-leak" in kinds

    def test_two_rectangles(self):
        d = two_squares()
        assert verify_tiling(d, "P").ok and verify_tiling(d, "Pprime").ok

    def test_tiling_implies_area_conservation(self):
        d = fixture("dudeney")
        total = sum((area(p) for p in d.pieces[1:]), area(d.pieces[0]))
        for which in ("P", "Pprime"):
            assert verify_tiling(d, which).ok
            assert sign(total - area(d.target(which))) == 0


class TestCornerLemmas:
    def test_dudeney_corner_counts(self):
        findings = check_corner_lemmas(fixture("dudeney"))
        assert violations(findings) == []
        counts = [len(f.corners) for f in findings if f.kind == "containment" and f.target == "P"]
        assert counts == [1, 1, 0, 1]
        square_counts = [len(f.corners) for f in findings if f.kind == "containment" and f.target == "Pprime"]
        assert square_counts == [1, 1, 1, 1]

    def test_chord_through_triangle_leaves_two_corners(self):
        bad = violations(check_corner_lemmas(chord_cut_triangle(Fraction(1, 2), Fraction(1, 2))))
        assert bad
        assert {f.kind for f in bad} == {"two-triangle-corners"}
        assert all(f.ref == "Lemma geom-T-vertex" for f in bad)

    def test_whole_square_has_diagonal_corners(self):
        bad = violations(check_corner_lemmas(fixture("square")))
        assert {f.kind for f in bad} == {"diagonal-square-corners"}
        assert all(f.ref == "Lemma geom-S-vertex" for f in bad)

    def test_long_piece_exceeds_square_diagonal(self):
        # a strip along the base of the triangle, too long to fit in the square
        t, s = triangle_T(), square_S()
        strip = Polygon([Point(0, 0), Point(2, 0), Point(Fraction(15, 8), sqrt(3) / 8), Point(Fraction(1, 8), sqrt(3) / 8)])
        d = Dissection([strip], {"P": t, "Pprime": s}, {"P": [IDENTITY], "Pprime": [IDENTITY]})
        assert "diameter" in {f.kind for f in violations(check_corner_lemmas(d))}


class TestSerialization:
    def test_round_trip(self):
        d = fixture("dudeney")
        again = load_dissection(dump_dissection(d))
        assert again.name == d.name
        for a, b in zip(d.pieces, again.pieces):
            assert a.corners == b.corners
        assert dump_dissection(again) == dump_dissection(d)

    def test_fixture_files_exist(self):
        for name in ("dudeney", "square", "triangle"):
            assert (FIXTURES / f"{name}.json").is_file()

    @pytest.mark.parametrize(
        "doc",
        [
            {"pieces": []},
            {"pieces": "x", "targets": {}, "placements_P": [], "placements_Pprime": []},
        ],
    )
    def test_schema_errors(self, doc):
        with pytest.raises(SchemaError):
            load_dissection(doc)

    def test_mismatched_placement_count(self):
        doc = dump_dissection(fixture("dudeney"))
        doc["placements_P"] = doc["placements_P"][:2]
        with pytest.raises(SchemaError):
            load_dissection(doc)

    def test_bad_scalar_text(self):
        doc = dump_dissection(fixture("square"))
        doc["pieces"][0][0][0] = "sqrt("
        with pytest.raises(SchemaError):
            load_dissection(doc)

    def test_points_helper(self):
        assert pts((0, 0))[0] == Point(0, 0)
