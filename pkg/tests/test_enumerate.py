from collections import Counter

import pytest

from dissect.cutgraph import canonical_code
from dissect.enumerate import (
    DiskCut,
    UnclassifiedPairError,
    admissible,
    all_pairs,
    build_disk_graph,
    case_of,
    case_structure_report,
    completeness,
    enumerate_abstract,
    enumerate_classes,
    face_corner_sets,
    feasibility_filter,
    first_cut_configurations,
    json_report,
    judge_pair,
    load_class_fixtures,
    text_report,
)
from dissect.jsonio import dumps

from helpers import recount
from reference_tables import CASE_OF, FEASIBLE_PAIRS, S_CC_DIFF, S_CC_HISTOGRAM, T_CC_DIFF, TRI_DIFF_HIGH_T, TRI_DIFF_LOW_S


@pytest.fixture(scope="module")
def t_classes():
    return load_class_fixtures("T")


@pytest.fixture(scope="module")
def s_classes():
    return load_class_fixtures("S")


@pytest.fixture(scope="module")
def by_label(t_classes, s_classes):
    return {c.label: c for c in t_classes + s_classes}


def grouped(classes):
    groups: dict[int, list[str]] = {}
    for c in classes:
        groups.setdefault(c.cc_diff, []).append(c.name)
    return {k: sorted(v) for k, v in groups.items()}


class TestAbstract:
    def test_six_topologies(self):
        tops = enumerate_abstract()
        assert [t.label for t in tops] == ["A", "B", "C", "D", "E", "F"]

    def test_first_cut_is_unique(self):
        assert len(first_cut_configurations()) == 1

    def test_every_topology_has_three_faces(self, t_classes, s_classes):
        for c in t_classes + s_classes:
            assert len(c.graph.faces()) == 3, c.label

    def test_deterministic(self):
        assert enumerate_abstract() == enumerate_abstract()


class TestClasses:
    def test_counts(self, t_classes, s_classes):
        assert len(t_classes) == 5 and len(s_classes) == 44

    def test_triangle_groups(self, t_classes):
        assert grouped(t_classes) == {k: sorted(v) for k, v in T_CC_DIFF.items()}

    def test_square_groups(self, s_classes):
        assert grouped(s_classes) == {k: sorted(v) for k, v in S_CC_DIFF.items()}
        assert dict(Counter(c.cc_diff for c in s_classes)) == S_CC_HISTOGRAM

    def test_degree_three_types_of_triangle_d_family(self, by_label):
        found = []
        for name in ("GT_D1", "GT_D2", "GT_D3"):
            g = by_label[name].graph
            inner = [g.types[v].value for v in range(g.n) if not g.types[v].on_boundary and g.degree(v) == 3]
            found.append(inner)
        assert found == [["convex"], ["flat"], ["reflex"]]

    @pytest.mark.parametrize("target, count", [("T", 5), ("S", 44)])
    def test_completeness(self, target, count):
        report = completeness(target)
        assert report.ok, report.to_json()
        assert len(report.matched) == count
        assert len({fixture for _, fixture in report.matched}) == count

    def test_enumeration_is_idempotent(self):
        a = [canonical_code(c.graph) for c in enumerate_classes("T")]
        b = [canonical_code(c.graph) for c in enumerate_classes("T")]
        assert a == b

    def test_two_diagonal_square_corners_rejected(self):
        # cut off corners 1 and 3; the middle face keeps the diagonal corners 0 and 2
        g = build_disk_graph("S", DiskCut("F", ((0, 1), (1, 1), (2, 1), (3, 1))))
        assert frozenset({0, 2}) in face_corner_sets(g)
        assert not admissible(g)

    def test_triangle_faces_get_one_corner_each(self, t_classes):
        for c in t_classes:
            assert sorted(len(s) for s in face_corner_sets(c.graph)) == [1, 1, 1]


class TestFilter:
    def test_feasible_pairs(self, t_classes, s_classes):
        kept = feasibility_filter(t_classes, s_classes)
        assert {p.key for p in kept} == FEASIBLE_PAIRS
        assert len(kept) == 46

    def test_cc_diff_mismatch(self, by_label):
        pair = judge_pair(by_label["GT_D1"], by_label["GS_A1"])
        assert not pair.kept
        assert "12" in pair.witness and "14" in pair.witness

    def test_tri_diff_exclusions(self, t_classes, s_classes, by_label):
        for t in TRI_DIFF_HIGH_T:
            assert by_label[f"GT_{t}"].tri_diff.lo >= 3
        for s in TRI_DIFF_LOW_S:
            assert by_label[f"GS_{s}"].tri_diff.hi < 3
        dropped = {p.key for p in all_pairs(t_classes, s_classes) if p.passed == ["cc-diff"]}
        assert dropped == {(f"GT_{t}", f"GS_{s}") for t in TRI_DIFF_HIGH_T for s in TRI_DIFF_LOW_S}

    def test_tri_diff_example(self, by_label):
        pair = judge_pair(by_label["GT_D2"], by_label["GS_A5"])
        assert not pair.kept and pair.passed == ["cc-diff"]
        assert pair.witness.startswith("tri-diff")

    def test_every_excluded_pair_has_a_witness(self, t_classes, s_classes):
        for p in all_pairs(t_classes, s_classes):
            assert p.kept == (p.witness is None)

    def test_byte_stable_output(self, t_classes, s_classes):
        first = dumps(json_report(t_classes, s_classes))
        again = dumps(json_report(load_class_fixtures("T"), load_class_fixtures("S")))
        assert first == again
        assert text_report(t_classes, s_classes) == text_report(t_classes, s_classes)

    def test_text_report_total(self, t_classes, s_classes):
        assert "total 46 pairs" in text_report(t_classes, s_classes)


class TestCases:
    def test_every_pair_has_exactly_one_case(self, t_classes, s_classes):
        kept = feasibility_filter(t_classes, s_classes)
        assert {p.key: case_structure_report(p).case for p in kept} == CASE_OF

    @pytest.mark.parametrize("t, s, case", [("GT_D1", "GS_F1", "A"), ("GT_D1", "GS_A3", "B"), ("GT_D3", "GS_C1", "C")])
    def test_examples(self, t, s, case):
        assert case_of(t, s) == case

    def test_unclassified(self):
        with pytest.raises(UnclassifiedPairError):
            case_of("GT_D1", "GS_A1")

    def test_case_a_pigeonhole(self, t_classes, s_classes):
        for pair in feasibility_filter(t_classes, s_classes):
            report = case_structure_report(pair)
            assert report.ref == "Lemma struct_BandC"
            if report.case == "A":
                u_shaped, _, _ = recount(pair.s)
                _, flat, trisected = recount(pair.t)
                assert flat + trisected < u_shaped, pair.key
                assert report.diagnostics["pigeonhole"] is True

    def test_cached_counts_match_recount(self, t_classes, s_classes):
        for c in t_classes + s_classes:
            assert (c.u_shaped, c.flat_nodes, c.trisected_mids) == recount(c), c.label

    def test_case_b_expectation(self, t_classes, s_classes):
        reports = [case_structure_report(p) for p in feasibility_filter(t_classes, s_classes)]
        b = [r for r in reports if r.case == "B"]
        assert len(b) == 6
        assert all("tree" in r.expectation for r in b)
