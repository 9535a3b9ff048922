from fractions import Fraction

import pytest

from dissect.cutgraph import (
    CombinatorialCutGraph,
    VertexType,
    build_cut_graph,
    canonical_code,
    canonicalize,
    cc_diff,
    equivalent,
    subdivide,
    theta_diff,
    to_combinatorial,
    tri_diff,
)
from dissect.dissection import Dissection, Polygon, triangle_T
from dissect.enumerate import load_class_fixtures
from dissect.geom import Angle, Point, corner_angle

from helpers import chord_cut_triangle, fixture, same_in_both, square_diagonals


def by_label(target):
    return {c.label: c for c in load_class_fixtures(target)}


def bent_chord_triangle() -> Dissection:
    """The mid-chord cut of the triangle with a bend added halfway along it."""
    t = triangle_T()
    A, B, C = t.corners
    p = (A + B).scale(Fraction(1, 2))
    q = (B + C).scale(Fraction(1, 2))
    bend = (p + q).scale(Fraction(1, 2)) + Point(Fraction(1, 20), 0)
    return same_in_both([Polygon([A, p, bend, q, C]), Polygon([p, B, q, bend])], t, "bent")


def distinct_float_corners(d, which):
    seen = set()
    for poly in d.placed(which):
        for c in poly.corners:
            x, y = c.to_float()
            seen.add((round(x, 9), round(y, 9)))
    return len(seen)


class TestBuild:
    def test_uncut_square(self):
        g = build_cut_graph(fixture("square"), "P")
        assert len(g.vertices) == 4
        assert len(g.edges) == 4 and all(e.kind == "boundary" for e in g.edges)
        assert len(g.faces) == 1
        assert g.type_counts() == {"corner": 4}

    def test_triangle_mid_chord(self):
        g = build_cut_graph(chord_cut_triangle(Fraction(1, 2), Fraction(1, 2)), "P")
        assert g.type_counts() == {"corner": 3, "side": 2}
        kinds = [e.kind for e in g.edges]
        assert kinds.count("boundary") == 5 and kinds.count("internal") == 1
        assert len(g.faces) == 2

    @pytest.mark.parametrize("which, types", [
        ("P", {"corner": 3, "side": 4, "flat": 2}),
        ("Pprime", {"corner": 4, "side": 4, "flat": 1}),
    ])
    def test_dudeney_structure(self, which, types):
        d = fixture("dudeney")
        g = build_cut_graph(d, which)
        assert g.type_counts() == types
        # independent count: distinct placed corners in floating point, then Euler
        assert len(g.vertices) == distinct_float_corners(d, which) == 9
        assert len(g.edges) == len(g.vertices) + (len(g.faces) + 1) - 2 == 12
        assert len(g.faces) == 4
        assert g.soft_flags == []

    def test_deterministic(self):
        d = fixture("dudeney")
        a, b = build_cut_graph(d, "P"), build_cut_graph(d, "P")
        assert [v.type for v in a.vertices] == [v.type for v in b.vertices]
        assert canonical_code(a) == canonical_code(b)

    def test_every_vertex_has_a_non_straight_angle(self):
        for name in ("dudeney", "square", "triangle"):
            for which in ("P", "Pprime"):
                for v in build_cut_graph(fixture(name), which).vertices:
                    assert any(a != Angle.of_pi(1) for a in v.angles)

    def test_diagonals_make_a_convex_centre(self):
        g = build_cut_graph(square_diagonals(), "P")
        centre = g.vertex_at(Point(Fraction(1, 2), Fraction(1, 2)))
        assert g.vertices[centre].type == VertexType.CONVEX
        assert g.degree(centre) == 4

    @pytest.mark.parametrize("name", ["dudeney", "square", "triangle"])
    @pytest.mark.parametrize("which", ["P", "Pprime"])
    def test_face_angle_sums(self, name, which):
        g = build_cut_graph(fixture(name), which)
        for cycle in g.faces.values():
            pts = [g.vertices[v].point for v in cycle]
            n = len(pts)
            total = Angle.zero()
            for i in range(n):
                total = total + corner_angle(pts[i - 1], pts[i], pts[(i + 1) % n]).angle
            assert total == Angle.of_pi(n - 2)


class TestInvariants:
    def test_uncut_square(self):
        assert cc_diff(build_cut_graph(fixture("square"), "P")) == 4

    def test_triangle_class_d1(self):
        assert cc_diff(by_label("T")["GT_D1"].graph) == 12

    def test_square_class_a1(self):
        assert cc_diff(by_label("S")["GS_A1"].graph) == 14

    @pytest.mark.parametrize("label", ["GT_D2", "GT_F1"])
    def test_tri_diff_lower_bound(self, label):
        assert tri_diff(by_label("T")[label].graph).lo >= 3

    def test_dudeney_geometric_values(self):
        g = build_cut_graph(fixture("dudeney"), "P")
        assert cc_diff(g) == 15
        assert tri_diff(g).value == 3

    def test_combinatorial_view_agrees(self):
        g = build_cut_graph(fixture("dudeney"), "Pprime")
        c = to_combinatorial(g)
        assert cc_diff(c) == cc_diff(g)
        for theta in (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3)):
            # irrational angles lose their value in the combinatorial view
            exact, bounds = theta_diff(g, theta), theta_diff(c, theta)
            assert exact.exact and bounds.lo <= exact.value <= bounds.hi

    def test_unknown_angle_gives_a_range(self):
        r = tri_diff(by_label("T")["GT_D1"].graph)
        assert not r.exact and r.value is None


class TestEquivalence:
    def test_subdivision_is_equivalent(self):
        g = by_label("T")["GT_D1"].graph
        internal = next(i for i, e in enumerate(g.edges) if e[2] == "internal")
        assert equivalent(g, subdivide(g, internal))

    def test_bent_cut_equivalent_to_straight(self):
        straight = build_cut_graph(chord_cut_triangle(Fraction(1, 2), Fraction(1, 2)), "P")
        bent = build_cut_graph(bent_chord_triangle(), "P")
        assert bent.type_counts()["paired"] == 1
        assert equivalent(straight, bent)

    def test_convex_and_reflex_centres_differ(self):
        t = by_label("T")
        assert not equivalent(t["GT_D1"].graph, t["GT_D3"].graph)

    def test_reflexive(self):
        for c in load_class_fixtures("S"):
            assert equivalent(c.graph, c.graph)

    def test_boundary_order_matters(self):
        s = by_label("S")
        assert not equivalent(s["GS_E2"].graph, s["GS_E3"].graph)

    def test_canonical_form_is_idempotent(self):
        for c in load_class_fixtures("T"):
            once = canonicalize(c.graph)
            assert canonical_code(canonicalize(once)) == canonical_code(once)

    def test_json_round_trip(self):
        for c in load_class_fixtures("T"):
            again = CombinatorialCutGraph.from_json(c.graph.to_json())
            assert canonical_code(again) == canonical_code(c.graph)

    def test_boundary_edge_cannot_be_subdivided(self):
        g = by_label("T")["GT_D1"].graph
        boundary = next(i for i, e in enumerate(g.edges) if e[2] == "boundary")
        with pytest.raises(ValueError):
            subdivide(g, boundary)
