import dataclasses
from collections import Counter
from fractions import Fraction

import pytest

from dissect.geom import Angle
from dissect.matching import (
    AlongSequenceError,
    CorrespondenceError,
    SideClassification,
    along_sequence,
    build_edge_diagram,
    build_vertex_diagram,
    check_all,
    classify_components,
    is_well_behaved,
    side_classification,
    to_dot,
    to_svg,
    u_shape_analysis,
    vg_angle,
    vg_anglesum,
    well_behaved_paths,
)
from dissect.kernel import sqrt

from helpers import (
    chord_cut_triangle,
    diagrams,
    fixture,
    fixture_diagrams,
    notch,
    poly,
    same_in_both,
    triangle_to_parallelogram,
    two_squares,
)
from test_cutgraph import bent_chord_triangle

CHECK_NAMES = [
    "eg_length", "vg_angle", "vg_anglesum", "vg_component", "side_component",
    "eg_to_vg", "adjacent", "monochromatic", "alternate", "useful",
]


def node_index(diagram, node_id):
    return next(i for i, n in enumerate(diagram.nodes) if n.id == node_id)


def union_find_sizes(count, pairs):
    parent = list(range(count))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in pairs:
        parent[find(a)] = find(b)
    return sorted(Counter(find(i) for i in range(count)).values())


def corner_cut_square():
    """Unit square with corners 0 and 1 cut off; the bottom side is split into equal thirds."""
    third, two_thirds = Fraction(1, 3), Fraction(2, 3)
    pieces = [
        poly((0, 0), (third, 0), (0, third)),
        poly((two_thirds, 0), (1, 0), (1, third)),
        poly((third, 0), (two_thirds, 0), (1, third), (1, 1), (0, 1), (0, third)),
    ]
    return same_in_both(pieces, poly((0, 0), (1, 0), (1, 1), (0, 1)), "corner-cut")


class TestEdgeDiagram:
    def test_dudeney_counts(self):
        gP, gQ, ed, _ = fixture_diagrams("dudeney")
        d = fixture("dudeney")
        assert len(ed.links) == sum(len(p.corners) for p in d.pieces) == 15
        flat = sum(1 for n in ed.nodes if n.kind == "flat")
        assert flat == 3
        assert ed.removed == [("P", 6)]
        assert len(ed.nodes) == len(gP.edges) + len(gQ.edges) - len(ed.removed) + flat == 26

    def test_degrees_are_one_or_two(self):
        for name in ("dudeney", "square", "triangle"):
            _, _, ed, _ = fixture_diagrams(name)
            assert {ed.degree(n) for n in range(len(ed.nodes))} <= {1, 2}

    def test_dudeney_paths(self):
        _, _, ed, _ = fixture_diagrams("dudeney")
        comps = ed.components()
        assert not any(c.cyclic for c in comps)
        assert sorted(len(c.nodes) for c in comps) == [2] * 7 + [3] * 4

    def test_two_piece_chord_cut(self):
        _, _, ed, _ = diagrams(triangle_to_parallelogram())
        comps = ed.components()
        through = [c for c in comps if any(ed.nodes[n].kind == "internal" for n in c.nodes)]
        assert len(through) == 2
        for c in through:
            assert not c.cyclic and len(c.nodes) == 3
            assert ed.nodes[c.nodes[1]].kind == "internal" and ed.degree(c.nodes[1]) == 2
            assert all(ed.nodes[n].kind == "boundary" for n in (c.nodes[0], c.nodes[-1]))
        rest = [c for c in comps if c not in through]
        assert all(len(c.nodes) == 2 for c in rest)

    def test_same_chord_in_both_copies_closes_a_cycle(self):
        _, _, ed, _ = diagrams(chord_cut_triangle(Fraction(1, 2), Fraction(1, 2)))
        cycles = [c for c in ed.components() if c.cyclic]
        assert len(cycles) == 1
        assert {ed.nodes[n].kind for n in cycles[0].nodes} == {"internal"}

    def test_no_flat_vertices_keeps_every_edge(self):
        gP, gQ, ed, _ = diagrams(two_squares())
        assert ed.removed == []
        assert len(ed.nodes) == len(gP.edges) + len(gQ.edges) == 14
        assert {n.kind for n in ed.nodes} == {"boundary", "internal"}

    def test_trisected_mid(self):
        _, _, ed, _ = diagrams(corner_cut_square())
        mids = [n for n in ed.nodes if n.trisected_mid]
        assert len(mids) == 2 and {n.which for n in mids} == {"P", "Pprime"}
        assert all(n.length2 == Fraction(1, 9) for n in mids)

    def test_graphs_from_another_dissection(self):
        gP, gQ, _, _ = diagrams(two_squares())
        with pytest.raises(CorrespondenceError):
            build_edge_diagram(fixture("dudeney"), gP, gQ)
        with pytest.raises(CorrespondenceError):
            build_vertex_diagram(fixture("dudeney"), gP, gQ)


class TestVertexDiagram:
    def test_identity_square(self):
        _, _, _, vd = fixture_diagrams("square")
        assert Counter(n.which for n in vd.nodes) == {"P": 4, "Pprime": 4}
        assert len(vd.links) == 4
        assert all(n.weight == Angle.of_pi(Fraction(1, 2)) for n in vd.nodes)
        assert [s.kind for s in classify_components(vd)] == ["path"] * 4

    def test_paired_weight(self):
        _, _, _, vd = diagrams(bent_chord_triangle())
        paired = [n for n in vd.nodes if n.type.value == "paired"]
        assert len(paired) == 2
        assert all(n.weight == Angle.of_pi(2) and n.expected == Angle.of_pi(2) for n in paired)

    def test_one_link_per_piece_corner(self):
        d = fixture("dudeney")
        _, _, _, vd = fixture_diagrams("dudeney")
        assert len(vd.links) == 15
        assert sorted(l.corner for l in vd.links) == [(i, j) for i, p in enumerate(d.pieces) for j in range(len(p.corners))]

    def test_link_angles_sum_per_piece(self):
        d = fixture("dudeney")
        _, _, _, vd = fixture_diagrams("dudeney")
        for i, p in enumerate(d.pieces):
            total = Angle.zero()
            for link in vd.links:
                if link.corner[0] == i:
                    total = total + link.angle
            assert total == Angle.of_pi(len(p.corners) - 2)

    def test_dudeney_components(self):
        _, _, _, vd = fixture_diagrams("dudeney")
        shapes = classify_components(vd)
        assert Counter(s.kind for s in shapes) == {"tree": 1, "cycle": 4, "path": 2}
        # independent grouping from the raw link ends
        sizes = union_find_sizes(len(vd.nodes), [l.ends for l in vd.links])
        assert sizes == sorted(len(m) for m, _ in vd.components())
        tree = next(s for s in shapes if s.kind == "tree")
        corners = [vd.nodes[n] for n in tree.nodes if vd.nodes[n].type.value == "corner"]
        assert sorted(n.which for n in corners) == ["P", "P", "P"]

    def test_side_classification(self):
        _, _, ed, vd = fixture_diagrams("dudeney")
        doc = side_classification(ed, vd).to_json(vd)
        assert doc["monochromatic"] == [] and doc["buried"] == []
        assert len(doc["divide_in_two"]) == 6


class TestChecks:
    def test_dudeney_all_pass(self):
        _, _, ed, vd = fixture_diagrams("dudeney")
        report = check_all(ed, vd)
        assert [r.name for r in report.results] == CHECK_NAMES
        assert report.ok
        assert {r.name for r in report.results if r.status == "pass"} == set(CHECK_NAMES) - {"vg_angle", "useful"}
        assert report["alternate"].checked == 60
        assert report["eg_length"].checked == 11

    def test_every_result_carries_a_ref(self):
        _, _, ed, vd = fixture_diagrams("dudeney")
        for r in check_all(ed, vd).results:
            assert r.ref and r.to_json()["ref"] == r.ref

    @pytest.mark.parametrize("name", ["square", "triangle"])
    def test_identity_passes(self, name):
        _, _, ed, vd = fixture_diagrams(name)
        assert check_all(ed, vd).ok

    def test_rewired_link_breaks_angle_sums(self):
        _, _, _, vd = fixture_diagrams("dudeney")
        comp = vd.component_index()
        link = vd.links[0]
        target = next(n for n, node in enumerate(vd.nodes) if node.which == "Pprime" and comp[n] != comp[link.ends[1]])
        links = list(vd.links)
        links[0] = dataclasses.replace(link, ends=(link.ends[0], target))
        broken = dataclasses.replace(vd, links=links)
        result = vg_anglesum(broken)
        assert result.status == "fail"
        assert any("component" in w for w in result.witnesses)

    def test_vg_angle_on_paired_path(self):
        _, _, _, vd = diagrams(notch())
        r = vg_angle(vd)
        assert r.status == "pass" and r.checked == 1

    def test_bent_chord_vacuous_component_rule(self):
        _, _, ed, vd = diagrams(bent_chord_triangle())
        report = check_all(ed, vd)
        assert report.ok
        assert report["vg_component"].status == "vacuous"


class TestWellBehaved:
    def test_buried_interior(self):
        sc = SideClassification({}, set(), {1, 2})
        assert is_well_behaved([0, 1, 2, 3], sc)
        assert not is_well_behaved([0, 5, 3], sc)
        assert is_well_behaved([0, 3], sc)

    def test_dudeney_paths_are_well_behaved(self):
        _, _, ed, vd = fixture_diagrams("dudeney")
        sc = side_classification(ed, vd)
        paths = well_behaved_paths(vd, sc)
        assert paths and all(is_well_behaved(p, sc) for p in paths)


@pytest.fixture(scope="module")
def rectangles():
    """Diagrams of the two-squares dissection and a vertex path crossing a divided side."""
    _, _, ed, vd = diagrams(two_squares())
    path = [node_index(vd, i) for i in ("P:v1", "Pprime:v1", "P:v2")]
    return ed, vd, path


class TestAlongSequence:
    def test_divided_side(self, rectangles):
        ed, vd, path = rectangles
        seq = along_sequence(vd, ed, path, (0, 3))
        assert seq.divided == ["Pprime:v1"]
        assert [t.rational for t in seq.terms] == [1, 2, 1]
        assert seq.zero

    def test_mutated_length_is_nonzero(self, rectangles):
        ed, vd, path = rectangles
        start = node_index(ed, along_sequence(vd, ed, path, (0, 3)).start)
        nodes = list(ed.nodes)
        nodes[start] = dataclasses.replace(nodes[start], length2=4)
        seq = along_sequence(vd, dataclasses.replace(ed, nodes=nodes), path, (0, 3))
        assert not seq.zero
        assert seq.alternating_sum == 1

    def test_single_edge_path(self):
        _, _, ed, vd = fixture_diagrams("dudeney")
        sc = side_classification(ed, vd)
        path = well_behaved_paths(vd, sc)[0]
        link = next(l for l in vd.node_links(path[0]) if vd.other(l, path[0]) == path[1])
        seq = along_sequence(vd, ed, path, vd.links[link].corner, sc)
        assert seq.divided == [] and len(seq.terms) == 2
        assert seq.zero

    def test_not_well_behaved(self, rectangles):
        ed, vd, _ = rectangles
        sc = side_classification(ed, vd)
        bad = next(
            [a, b, c]
            for a in range(len(vd.nodes))
            for b in range(len(vd.nodes))
            for c in range(len(vd.nodes))
            if len({a, b, c}) == 3 and not is_well_behaved([a, b, c], sc)
        )
        with pytest.raises(AlongSequenceError):
            along_sequence(vd, ed, bad, (0, 0), sc)


class TestUShape:
    def test_dudeney(self):
        _, gQ, ed, vd = fixture_diagrams("dudeney")
        report = u_shape_analysis(gQ, ed, vd)
        assert report["ref"] == "Lemma U-shape"
        assert report["status"] == "pass"
        assert report["u_shaped"] == 0
        assert report["candidates"] == {"square": 1, "other": 2}

    def test_identity_square_is_vacuous(self):
        _, gQ, ed, vd = fixture_diagrams("square")
        report = u_shape_analysis(gQ, ed, vd)
        assert report["u_shaped"] == 4
        assert report["status"] == "vacuous"


class TestExport:
    def test_dot_is_byte_stable(self):
        _, _, ed, vd = fixture_diagrams("dudeney")
        _, _, ed2, vd2 = diagrams(fixture("dudeney"))
        assert to_dot(ed) == to_dot(ed2)
        assert to_dot(vd) == to_dot(vd2)
        assert to_dot(ed).startswith("graph ")

    def test_dot_lists_every_link(self):
        _, _, ed, _ = fixture_diagrams("dudeney")
        dot = to_dot(ed)
        assert all(l.id in dot for l in ed.links)

    def test_svg(self):
        _, _, _, vd = fixture_diagrams("dudeney")
        svg = to_svg(vd)
        assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
        assert svg == to_svg(diagrams(fixture("dudeney"))[3])

    def test_json(self):
        _, _, ed, vd = fixture_diagrams("dudeney")
        assert len(ed.to_json()["links"]) == 15
        assert abs(ed.to_json()["links"][0]["length"] - float(sqrt(ed.links[0].length2))) < 1e-12
        assert len(vd.to_json()["nodes"]) == len(vd.nodes)
