"""Enumeration of three-piece cut-graph classes and the pair filter built on them.

Two cuts split a disk into three regions in six ways, distinguished by how the
second cut attaches to the first:

``A``  both ends on the interior of the first cut (a lens on the first cut)
``B``  one end at an end of the first cut, one on its interior
``C``  both ends at the ends of the first cut (a lens between boundary points)
``D``  one end on the boundary, one on the interior of the first cut
``E``  one end at an end of the first cut, the other on the boundary
``F``  both ends on the boundary, away from the first cut

A :class:`DiskCut` fixes one of these topologies together with where each
boundary end sits on the target (at a corner or on a side) and the type of
each internal meeting point.  :func:`build_disk_graph` turns it into a
:class:`CombinatorialCutGraph`.  :func:`enumerate_classes` runs through every
placement, keeps those that respect the corner rules of the target and
deduplicates up to equivalence.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

from .cutgraph import (
    CombinatorialCutGraph,
    DiffRange,
    VertexType,
    canonical_code,
    cc_diff,
    default_angle_tags,
    tri_diff,
)

__all__ = [
    "AbstractTopology",
    "DiskCut",
    "TOPOLOGIES",
    "enumerate_abstract",
    "first_cut_configurations",
    "build_disk_graph",
    "face_corner_sets",
    "admissible",
    "enumerate_cuts",
    "enumerate_classes",
    "AnnotatedClass",
    "annotate",
    "load_class_fixtures",
    "completeness",
    "FeasiblePair",
    "judge_pair",
    "all_pairs",
    "feasibility_filter",
    "CASE_TABLE",
    "case_of",
    "case_structure_report",
    "UnclassifiedPairError",
    "text_report",
    "json_report",
]

TARGET_CORNERS = {"T": 3, "S": 4, "disk": 0}
TARGET_CORNER_SIXTHS = {"T": 2, "S": 3, "disk": 0}
INTERNAL_TYPES = ("convex", "flat", "reflex")


@dataclass(frozen=True)
class AbstractTopology:
    label: str
    description: str
    boundary_points: int  # distinct boundary ends over both cuts
    points_on_first_cut: int  # internal meeting points on the first cut
    sided: bool  # whether a bulging second cut needs a side of the first cut


TOPOLOGIES: tuple[AbstractTopology, ...] = (
    AbstractTopology("A", "lens on the interior of the first cut", 2, 2, True),
    AbstractTopology("B", "lens from an end of the first cut to its interior", 2, 1, True),
    AbstractTopology("C", "lens between the two ends of the first cut", 2, 0, True),
    AbstractTopology("D", "from the boundary to the interior of the first cut", 3, 1, False),
    AbstractTopology("E", "fan from an end of the first cut to the boundary", 3, 0, False),
    AbstractTopology("F", "two cuts with disjoint ends", 4, 0, False),
)
_BY_LABEL = {t.label: t for t in TOPOLOGIES}


def enumerate_abstract() -> list[AbstractTopology]:
    """The six ways a second cut can be added to a disk already split by one cut."""
    return list(TOPOLOGIES)


def first_cut_configurations() -> list[tuple[int, int]]:
    """A single cut across a disk: one configuration, two boundary ends."""
    return [(0, 1)]


@dataclass(frozen=True)
class DiskCut:
    """A concrete two-cut drawing on a target.

    ``hosts`` gives each boundary end as ``(side, rank)``: rank 0 is the corner
    that starts side ``side`` and rank ``r >= 1`` is the ``r``-th point along
    that side.  The ends are, by topology,

    ``A, B, C``  (x, y): first cut from x to y
    ``D``        (x, y, z): first cut x to y, second from z to its midpoint
    ``E``        (x, y, z): cuts x to y and x to z
    ``F``        (x, y, z, w): cuts x to y and z to w

    ``internal`` lists the types of the meeting points on the first cut (in
    order from x to y) and ``side`` is +1 when a bulging second cut lies to
    the left of x to y, -1 to the right.
    """

    topology: str
    hosts: tuple[tuple[int, int], ...]
    internal: tuple[str, ...] = ()
    side: int = 0

    def __post_init__(self) -> None:
        top = _BY_LABEL[self.topology]
        if len(self.hosts) != top.boundary_points:
            raise ValueError(f"topology {self.topology} needs {top.boundary_points} boundary ends")
        if len(set(self.hosts)) != len(self.hosts):
            raise ValueError("boundary ends must be distinct")
        if len(self.internal) != top.points_on_first_cut:
            raise ValueError(f"topology {self.topology} needs {top.points_on_first_cut} internal types")
        if top.sided != (self.side != 0):
            raise ValueError("side must be +1/-1 exactly for lens topologies")


def _corner_angle(n: int, j: int) -> float:
    return 2 * math.pi * j / n if n else 0.0


def build_disk_graph(target: str, cut: DiskCut, *, label: str = "", family: str = "") -> CombinatorialCutGraph:
    """Draw ``cut`` on the unit disk and read off the embedded cut graph."""
    n = TARGET_CORNERS[target]
    corner_sixths = TARGET_CORNER_SIXTHS[target]
    for side, rank in cut.hosts:
        if n and not 0 <= side < n:
            raise ValueError(f"side {side} out of range for {target}")
        if rank < 0 or (n == 0 and rank == 0):
            raise ValueError(f"bad rank {rank}")

    # boundary vertices in counterclockwise order with a position on the circle
    max_rank: dict[int, int] = {}
    for side, rank in cut.hosts:
        max_rank[side] = max(max_rank.get(side, 0), rank)
    boundary_keys: list[tuple[int, int]] = []
    if n:
        for j in range(n):
            boundary_keys.append((j, 0))
            boundary_keys.extend((j, r) for r in range(1, max_rank.get(j, 0) + 1) if (j, r) in cut.hosts)
    else:
        boundary_keys = sorted(cut.hosts, key=lambda h: h[1])
    step = 2 * math.pi / n if n else 2 * math.pi

    def circle_angle(key: tuple[int, int]) -> float:
        j, r = key
        if n == 0:
            return 2 * math.pi * r / (max(max_rank.values()) + 1)
        return _corner_angle(n, j) + step * r / (max_rank.get(j, 0) + 1)

    pos: list[tuple[float, float]] = []
    types: list[VertexType] = []
    index: dict[tuple[int, int], int] = {}
    for key in boundary_keys:
        a = circle_angle(key)
        index[key] = len(pos)
        pos.append((math.cos(a), math.sin(a)))
        types.append(VertexType.CORNER if key[1] == 0 else VertexType.SIDE)
    nb = len(boundary_keys)
    boundary = list(range(nb))

    def add_vertex(p: tuple[float, float], vtype: VertexType) -> int:
        pos.append(p)
        types.append(vtype)
        return len(pos) - 1

    edges: list[tuple[int, int, str]] = []

    def add_edge(u: int, v: int, kind: str) -> None:
        edges.append((u, v, kind))

    for k in range(nb):
        add_edge(k, (k + 1) % nb, "boundary")

    def lerp(p, q, t):
        return (p[0] + (q[0] - p[0]) * t, p[1] + (q[1] - p[1]) * t)

    def bulge(p, q, toward_side: int, x_key, y_key):
        # pull the midpoint of pq halfway toward the arc of the circle on the given side of x->y
        a1, a2 = circle_angle(x_key), circle_angle(y_key)
        # the arc from x counterclockwise to y lies to the right of x->y
        if toward_side < 0:
            lo, hi = a1, a2
        else:
            lo, hi = a2, a1
        if hi <= lo:
            hi += 2 * math.pi
        mid_angle = (lo + hi) / 2
        arc_mid = (math.cos(mid_angle), math.sin(mid_angle))
        m = lerp(p, q, 0.5)
        return lerp(m, arc_mid, 0.5)

    h = cut.hosts
    t = cut.topology
    x = index[h[0]]
    y = index[h[1]]
    if t == "F":
        z, w = index[h[2]], index[h[3]]
        if _interleaved(x, y, z, w):
            raise ValueError("the two cuts cross")
        add_edge(x, y, "internal")
        add_edge(z, w, "internal")
    elif t == "E":
        z = index[h[2]]
        add_edge(x, y, "internal")
        add_edge(x, z, "internal")
    elif t == "D":
        z = index[h[2]]
        m = add_vertex(lerp(pos[x], pos[y], 0.5), VertexType(cut.internal[0]))
        add_edge(x, m, "internal")
        add_edge(m, y, "internal")
        add_edge(z, m, "internal")
    elif t == "C":
        b = add_vertex(bulge(pos[x], pos[y], cut.side, h[0], h[1]), VertexType.PAIRED)
        add_edge(x, y, "internal")
        add_edge(x, b, "internal")
        add_edge(b, y, "internal")
    elif t == "B":
        m = add_vertex(lerp(pos[x], pos[y], 0.5), VertexType(cut.internal[0]))
        b = add_vertex(bulge(pos[x], pos[m], cut.side, h[0], h[1]), VertexType.PAIRED)
        add_edge(x, m, "internal")
        add_edge(m, y, "internal")
        add_edge(x, b, "internal")
        add_edge(b, m, "internal")
    elif t == "A":
        m1 = add_vertex(lerp(pos[x], pos[y], 1 / 3), VertexType(cut.internal[0]))
        m2 = add_vertex(lerp(pos[x], pos[y], 2 / 3), VertexType(cut.internal[1]))
        b = add_vertex(bulge(pos[m1], pos[m2], cut.side, h[0], h[1]), VertexType.PAIRED)
        add_edge(x, m1, "internal")
        add_edge(m1, m2, "internal")
        add_edge(m2, y, "internal")
        add_edge(m1, b, "internal")
        add_edge(b, m2, "internal")

    nv = len(pos)
    darts: list[list[tuple[float, tuple[int, int]]]] = [[] for _ in range(nv)]
    for e, (u, v, kind) in enumerate(edges):
        for end, (a, bnd) in enumerate(((u, v), (v, u))):
            if kind == "boundary":
                # boundary arcs leave along the tangent of the circle
                px, py = pos[a]
                forward = end == 0  # edge listed from a boundary vertex to its successor
                dx, dy = (-py, px) if forward else (py, -px)
            else:
                dx, dy = pos[bnd][0] - pos[a][0], pos[bnd][1] - pos[a][1]
            darts[a].append((math.atan2(dy, dx), (e, end)))
    rotation: list[list[tuple[int, int]]] = []
    for v in range(nv):
        ds = darts[v]
        if v < nb:
            # counterclockwise from the forward tangent
            base = next(ang for ang, (e, end) in ds if edges[e][2] == "boundary" and end == 0)
            ds.sort(key=lambda item: (item[0] - base) % (2 * math.pi))
        else:
            ds.sort(key=lambda item: item[0])
        rotation.append([d for _, d in ds])

    angles = []
    for v in range(nv):
        deg = len(rotation[v])
        angles.append(default_angle_tags(types[v], deg, corner_sixths))
    g = CombinatorialCutGraph(
        target=target,
        corner_sixths=corner_sixths,
        types=types,
        edges=edges,
        rotation=rotation,
        boundary=boundary,
        angles=angles,
        label=label,
        family=family,
    )
    g.validate()
    return g


def _interleaved(a: int, b: int, c: int, d: int) -> bool:
    """Whether chords a-b and c-d cross, for distinct positions on a cycle."""
    lo, hi = sorted((a, b))
    return (lo < c < hi) != (lo < d < hi)


def face_corner_sets(g: CombinatorialCutGraph) -> list[frozenset[int]]:
    """For each bounded face, the target corners on its closure, by corner number."""
    corner_number = {v: i for i, v in enumerate(g.corners())}
    out = []
    for face in g.faces():
        out.append(frozenset(corner_number[v] for v in face if v in corner_number))
    return out


def admissible(g: CombinatorialCutGraph) -> bool:
    """Corner rules for three pieces.

    On the triangle every region holds exactly one corner.  On the square no
    region holds two diagonally opposite corners.
    """
    sets = face_corner_sets(g)
    if g.target == "T":
        return all(len(s) == 1 for s in sets)
    if g.target == "S":
        return not any({0, 2} <= s or {1, 3} <= s for s in sets)
    return True


def _host_layouts(n: int, count: int) -> Iterable[tuple[tuple[int, int], ...]]:
    """All placements of ``count`` labeled boundary ends, up to rotating the target."""
    hosts = [(j, 0) for j in range(n)] + [(j, None) for j in range(n)]
    for choice in itertools.product(range(len(hosts)), repeat=count):
        picked = [hosts[c] for c in choice]
        corners = [h for h in picked if h[1] == 0]
        if len(set(corners)) != len(corners):
            continue
        if picked[0][0] != 0:
            continue  # rotate so the first end sits at corner 0 or on side 0
        per_side: dict[int, list[int]] = {}
        for i, (j, r) in enumerate(picked):
            if r is None:
                per_side.setdefault(j, []).append(i)
        sides = sorted(per_side)
        for perms in itertools.product(*(itertools.permutations(per_side[j]) for j in sides)):
            out = list(picked)
            for j, perm in zip(sides, perms):
                for rank, i in enumerate(perm, start=1):
                    out[i] = (j, rank)
            yield tuple(out)


def enumerate_cuts(target: str) -> Iterable[DiskCut]:
    """Every drawing of two cuts on ``target`` (before any filtering)."""
    n = TARGET_CORNERS[target]
    for top in TOPOLOGIES:
        sides = (1, -1) if top.sided else (0,)
        for hosts in _host_layouts(n, top.boundary_points):
            for internal in itertools.product(INTERNAL_TYPES, repeat=top.points_on_first_cut):
                for side in sides:
                    yield DiskCut(top.label, hosts, tuple(internal), side)


# ---------------------------------------------------------------------------
# annotated classes
# ---------------------------------------------------------------------------

FIXTURE_DIR = Path(__file__).resolve().parent / "fixtures" / "classes"
FAMILY_ORDER = "ABCDEF"


def label_key(label: str) -> tuple[str, int, int]:
    """Sort key for labels such as ``GS_D5``: target, family, number."""
    prefix, _, name = label.partition("_")
    family = name[:1]
    number = int(name[1:]) if name[1:].isdigit() else 10**6
    return (prefix, FAMILY_ORDER.index(family) if family in FAMILY_ORDER else len(FAMILY_ORDER), number)


def _side_edge_counts(g: CombinatorialCutGraph) -> list[int]:
    """Number of boundary edges along each target side, in boundary order from the first corner."""
    corners = set(g.corners())
    b = g.boundary
    start = next(i for i, v in enumerate(b) if v in corners)
    counts: list[int] = []
    run = 0
    for k in range(1, len(b) + 1):
        run += 1
        if b[(start + k) % len(b)] in corners:
            counts.append(run)
            run = 0
    return counts


def u_shaped_count(g: CombinatorialCutGraph) -> int:
    """Target sides left whole with both end corners uncut."""
    corners = g.corners()
    count = 0
    for k, c in enumerate(corners):
        nxt = corners[(k + 1) % len(corners)]
        i = g.boundary.index(c)
        whole = g.boundary[(i + 1) % len(g.boundary)] == nxt
        if whole and g.degree(c) == 2 and g.degree(nxt) == 2:
            count += 1
    return count


def flat_vertex_count(g: CombinatorialCutGraph) -> int:
    return sum(1 for t in g.types if t == VertexType.FLAT)


def trisected_side_count(g: CombinatorialCutGraph) -> int:
    """Target sides cut into exactly three boundary edges."""
    return sum(1 for c in _side_edge_counts(g) if c == 3)


@dataclass
class AnnotatedClass:
    """A cut-graph class with its label and cached invariants."""

    label: str
    target: str
    base: AbstractTopology
    graph: CombinatorialCutGraph
    cc_diff: int
    tri_diff: DiffRange
    u_shaped: int
    flat_nodes: int
    trisected_mids: int
    drawing: DiskCut | None = None
    variants: int = 1

    @property
    def name(self) -> str:
        return self.label.partition("_")[2]

    @property
    def candidates(self) -> int:
        """Flat nodes plus trisected-mid nodes available as far ends of edge paths."""
        return self.flat_nodes + self.trisected_mids

    def invariants(self) -> dict[str, Any]:
        return {
            "cc_diff": self.cc_diff,
            "tri_diff": [self.tri_diff.lo, self.tri_diff.hi],
            "u_shaped": self.u_shaped,
            "flat_nodes": self.flat_nodes,
            "trisected_mids": self.trisected_mids,
        }

    def to_json(self) -> dict[str, Any]:
        doc = {"label": self.label, "target": self.target, "topology": self.base.label}
        doc.update(self.invariants())
        return doc


def annotate(g: CombinatorialCutGraph, label: str | None = None, drawing: DiskCut | None = None) -> AnnotatedClass:
    label = label or g.label
    family = g.family or label.partition("_")[2][:1]
    return AnnotatedClass(
        label=label,
        target=g.target,
        base=_BY_LABEL[family],
        graph=g,
        cc_diff=cc_diff(g),
        tri_diff=tri_diff(g),
        u_shaped=u_shaped_count(g),
        flat_nodes=flat_vertex_count(g),
        trisected_mids=trisected_side_count(g),
        drawing=drawing,
    )


def load_class_fixtures(target: str, directory: str | Path | None = None) -> list[AnnotatedClass]:
    """The frozen class fixtures for ``target`` ("T" or "S"), in label order."""
    root = Path(directory) if directory else FIXTURE_DIR
    prefix = {"T": "gt", "S": "gs"}[target]
    out = []
    for path in root.glob(f"{prefix}_*.json"):
        doc = json.loads(path.read_text())
        g = CombinatorialCutGraph.from_json(doc)
        drawing = None
        if "drawing" in doc:
            dr = doc["drawing"]
            drawing = DiskCut(dr["topology"], tuple(tuple(h) for h in dr["hosts"]), tuple(dr["internal"]), dr["side"])
        out.append(annotate(g, drawing=drawing))
    out.sort(key=lambda c: label_key(c.label))
    return out


def _enumerate_raw(target: str) -> list[AnnotatedClass]:
    found: dict[tuple, AnnotatedClass] = {}
    for cut in enumerate_cuts(target):
        try:
            g = build_disk_graph(target, cut, family=cut.topology)
        except ValueError:
            continue
        if not admissible(g):
            continue
        code = canonical_code(g)
        if code in found:
            found[code].variants += 1
            continue
        found[code] = annotate(g, label=f"G{target}_{cut.topology}?", drawing=cut)
    return list(found.values())


def enumerate_classes(target: str, fixtures: Sequence[AnnotatedClass] | None = None) -> list[AnnotatedClass]:
    """Every admissible class of two-cut graphs on ``target`` up to equivalence.

    Classes equivalent to a fixture take the fixture's label; any others are
    labeled ``G<target>_<topology>?<n>`` so they stand out.  The result is in
    label order.
    """
    if fixtures is None:
        fixtures = load_class_fixtures(target) if FIXTURE_DIR.is_dir() else []
    by_code = {canonical_code(f.graph): f.label for f in fixtures}
    out = _enumerate_raw(target)
    extra = 0
    for c in out:
        label = by_code.get(canonical_code(c.graph))
        if label is None:
            extra += 1
            label = f"G{target}_{c.base.label}?{extra}"
        c.label = label
        c.graph.label = label
    out.sort(key=lambda c: label_key(c.label))
    return out


@dataclass
class CompletenessReport:
    target: str
    matched: list[tuple[str, str]]  # (generated label, fixture label)
    unmatched_generated: list[AnnotatedClass]
    unmatched_fixtures: list[str]
    duplicate_fixtures: list[tuple[str, str]]

    @property
    def ok(self) -> bool:
        return not (self.unmatched_generated or self.unmatched_fixtures or self.duplicate_fixtures)

    def to_json(self) -> dict[str, Any]:
        return {
            "target": self.target,
            "ok": self.ok,
            "matched": len(self.matched),
            "unmatched_generated": [
                {"topology": c.base.label, "drawing": _drawing_json(c.drawing), **c.invariants()}
                for c in self.unmatched_generated
            ],
            "unmatched_fixtures": self.unmatched_fixtures,
            "duplicate_fixtures": [list(p) for p in self.duplicate_fixtures],
        }


def _drawing_json(cut: DiskCut | None) -> dict[str, Any] | None:
    if cut is None:
        return None
    return {"topology": cut.topology, "hosts": [list(h) for h in cut.hosts], "internal": list(cut.internal), "side": cut.side}


def completeness(target: str, fixtures: Sequence[AnnotatedClass] | None = None) -> CompletenessReport:
    """Compare the enumeration with the fixtures class by class under equivalence."""
    if fixtures is None:
        fixtures = load_class_fixtures(target)
    codes: dict[tuple, str] = {}
    duplicates = []
    for f in fixtures:
        code = canonical_code(f.graph)
        if code in codes:
            duplicates.append((codes[code], f.label))
        else:
            codes[code] = f.label
    matched = []
    unmatched = []
    hit: set[str] = set()
    for c in _enumerate_raw(target):
        label = codes.get(canonical_code(c.graph))
        if label is None:
            unmatched.append(c)
        else:
            matched.append((c.label, label))
            hit.add(label)
    missing = [f.label for f in fixtures if f.label not in hit and f.label in codes.values()]
    return CompletenessReport(target, matched, unmatched, missing, duplicates)


# ---------------------------------------------------------------------------
# pair filter and case assignment
# ---------------------------------------------------------------------------

@dataclass
class FeasiblePair:
    t: AnnotatedClass
    s: AnnotatedClass
    kept: bool
    passed: list[str]  # filters the pair survived
    witness: str | None = None  # why the pair was dropped
    case: str | None = None

    @property
    def key(self) -> tuple[str, str]:
        return (self.t.label, self.s.label)

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"T": self.t.label, "S": self.s.label, "kept": self.kept, "passed": self.passed}
        if self.witness:
            doc["witness"] = self.witness
        if self.case:
            doc["case"] = self.case
        return doc


def _t_order(classes: Iterable[AnnotatedClass]) -> list[AnnotatedClass]:
    return sorted(classes, key=lambda c: (-c.cc_diff, label_key(c.label)))


def judge_pair(t: AnnotatedClass, s: AnnotatedClass) -> FeasiblePair:
    """Apply the angle-count filters to one pair, keeping a witness when it fails."""
    if t.cc_diff != s.cc_diff:
        return FeasiblePair(t, s, False, [], f"cc-diff {t.cc_diff} != {s.cc_diff}")
    passed = ["cc-diff"]
    lo, hi = t.tri_diff, s.tri_diff
    if lo.lo > hi.hi or hi.lo > lo.hi:
        return FeasiblePair(t, s, False, passed, f"tri-diff {lo} and {hi} cannot agree")
    passed.append("tri-diff")
    return FeasiblePair(t, s, True, passed)


def all_pairs(t_classes: Sequence[AnnotatedClass], s_classes: Sequence[AnnotatedClass]) -> list[FeasiblePair]:
    """Every (triangle class, square class) pair with its filter verdict, in report order."""
    s_sorted = sorted(s_classes, key=lambda c: label_key(c.label))
    return [judge_pair(t, s) for t in _t_order(t_classes) for s in s_sorted]


def feasibility_filter(t_classes: Sequence[AnnotatedClass], s_classes: Sequence[AnnotatedClass]) -> list[FeasiblePair]:
    """Pairs whose cc-diff agree and whose tri-diff ranges overlap."""
    return [p for p in all_pairs(t_classes, s_classes) if p.kept]


REF_CASES = "Lemma struct_BandC"
REF_U_SHAPE = "Lemma U-shape"

CASE_TABLE: dict[str, list[tuple[tuple[str, ...], tuple[str, ...]]]] = {
    "A": [
        (("GT_D1",), ("GS_D6", "GS_F1", "GS_F2", "GS_F4", "GS_F11", "GS_F3")),
        (("GT_D2", "GT_F1"), ("GS_B2", "GS_E1", "GS_E3")),
        (("GT_D3", "GT_E1"), ("GS_F8",)),
    ],
    "B": [
        (("GT_D1",), ("GS_A3", "GS_D7")),
        (("GT_D2", "GT_F1"), ("GS_E2", "GS_E4")),
    ],
    "C": [
        (("GT_D1",), ("GS_A4", "GS_B1", "GS_D3", "GS_D4")),
        (("GT_D2", "GT_F1"), ("GS_D5",)),
        (
            ("GT_D3", "GT_E1"),
            ("GS_A6", "GS_B3", "GS_C1", "GS_D10", "GS_D13", "GS_D14", "GS_E5", "GS_E6", "GS_E7", "GS_F10"),
        ),
    ],
}

CASE_EXPECTATION = {
    "A": "fewer flat and trisected-mid nodes than U-shaped boundaries",
    "B": "a well-behaved tree joins a degree-3 vertex to every triangle corner",
    "C": "a well-behaved path joins corners of the square",
}


class UnclassifiedPairError(LookupError):
    """A surviving pair appears in no case set, or in more than one."""


def case_of(t_label: str, s_label: str) -> str:
    hits = [
        case
        for case, blocks in CASE_TABLE.items()
        for ts, ss in blocks
        if t_label in ts and s_label in ss
    ]
    if len(hits) != 1:
        state = "unclassified" if not hits else f"in several cases {hits}"
        raise UnclassifiedPairError(f"({t_label}, {s_label}) is {state}")
    return hits[0]


@dataclass
class CaseReport:
    t: str
    s: str
    case: str
    ref: str
    expectation: str
    diagnostics: dict[str, Any]

    def to_json(self) -> dict[str, Any]:
        return {
            "T": self.t,
            "S": self.s,
            "case": self.case,
            "ref": self.ref,
            "expectation": self.expectation,
            "diagnostics": self.diagnostics,
        }


def case_structure_report(pair: FeasiblePair) -> CaseReport:
    """Case assignment with the structural counts that go with it.

    For every case the report carries the pigeonhole counts: U-shaped
    boundaries of the square class against flat and trisected-mid nodes of
    the triangle class.  Square-side flat and trisected-mid nodes are listed
    for reference but not counted, since they cannot close an edge path of
    full side length.  For Case A the pigeonhole must hold.
    """
    case = case_of(pair.t.label, pair.s.label)
    t, s = pair.t, pair.s
    diag: dict[str, Any] = {
        "u_shaped": s.u_shaped,
        "t_flat_nodes": t.flat_nodes,
        "t_trisected_mids": t.trisected_mids,
        "s_flat_nodes": s.flat_nodes,
        "s_trisected_mids": s.trisected_mids,
        "pigeonhole": t.candidates < s.u_shaped,
    }
    if case == "B":
        diag["t_degree3_internal"] = sum(
            1 for v, ty in enumerate(t.graph.types) if not ty.on_boundary and t.graph.degree(v) == 3
        )
    if case == "C":
        diag["s_cut_corners"] = sum(1 for v in s.graph.corners() if s.graph.degree(v) > 2)
    pair.case = case
    return CaseReport(t.label, s.label, case, REF_CASES, CASE_EXPECTATION[case], diag)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def _short(label: str) -> str:
    return label.partition("_")[2]


def _group_by_cc(classes: Iterable[AnnotatedClass]) -> list[tuple[int, list[AnnotatedClass]]]:
    groups: dict[int, list[AnnotatedClass]] = {}
    for c in classes:
        groups.setdefault(c.cc_diff, []).append(c)
    return [(cc, sorted(v, key=lambda c: label_key(c.label))) for cc, v in sorted(groups.items(), reverse=True)]


def _families(pairs: Sequence[FeasiblePair]) -> list[tuple[list[str], list[str]]]:
    """Group kept pairs into products {T...} x {S...} sharing the same square list."""
    by_t: dict[str, list[str]] = {}
    order: list[str] = []
    for p in pairs:
        if p.t.label not in by_t:
            order.append(p.t.label)
        by_t.setdefault(p.t.label, []).append(p.s.label)
    fams: list[tuple[list[str], list[str]]] = []
    for t in order:
        for ts, ss in fams:
            if ss == by_t[t]:
                ts.append(t)
                break
        else:
            fams.append(([t], by_t[t]))
    return fams


def text_report(t_classes: Sequence[AnnotatedClass], s_classes: Sequence[AnnotatedClass]) -> str:
    """Aligned plain-text tables: cc-diff groups, tri-diff bounds, surviving pairs, cases."""
    lines = ["cc-diff"]
    for target, classes in (("T", t_classes), ("S", s_classes)):
        for cc, group in _group_by_cc(classes):
            names = ", ".join(_short(c.label) for c in group)
            lines.append(f"  {target} {cc:>3}  ({len(group):>2})  {names}")
    lines.append("")
    lines.append("tri-diff")
    for c in _t_order(t_classes):
        lines.append(f"  T {_short(c.label):<4} {str(c.tri_diff):>8}")
    pairs = all_pairs(t_classes, s_classes)
    dropped = [p for p in pairs if not p.kept and p.passed == ["cc-diff"]]
    if dropped:
        lines.append("  dropped by tri-diff:")
        for ts, ss in _families(dropped):
            lines.append(f"    {{{', '.join(map(_short, ts))}}} x {{{', '.join(map(_short, ss))}}}")
    lines.append("")
    kept = [p for p in pairs if p.kept]
    lines.append("feasible combinations")
    for ts, ss in _families(kept):
        lines.append(f"  {{{', '.join(map(_short, ts))}}} x {{{', '.join(map(_short, ss))}}}  ({len(ts) * len(ss)} pairs)")
    lines.append(f"  total {len(kept)} pairs")
    lines.append("")
    lines.append("cases")
    for case in CASE_TABLE:
        members = [p for p in kept if _safe_case(p) == case]
        fams = _families(members)
        for ts, ss in fams:
            lines.append(f"  {case}  {{{', '.join(map(_short, ts))}}} x {{{', '.join(map(_short, ss))}}}")
    unclassified = [p for p in kept if _safe_case(p) is None]
    for p in unclassified:
        lines.append(f"  unclassified  ({_short(p.t.label)}, {_short(p.s.label)})")
    return "\n".join(lines) + "\n"


def _safe_case(p: FeasiblePair) -> str | None:
    try:
        return case_of(p.t.label, p.s.label)
    except UnclassifiedPairError:
        return None


def json_report(t_classes: Sequence[AnnotatedClass], s_classes: Sequence[AnnotatedClass]) -> dict[str, Any]:
    kept = feasibility_filter(t_classes, s_classes)
    return {
        "schema": 1,
        "classes": {
            "T": [c.to_json() for c in sorted(t_classes, key=lambda c: label_key(c.label))],
            "S": [c.to_json() for c in sorted(s_classes, key=lambda c: label_key(c.label))],
        },
        "pairs": [p.to_json() for p in all_pairs(t_classes, s_classes)],
        "feasible": [list(p.key) for p in kept],
        "cases": [case_structure_report(p).to_json() if _safe_case(p) else {"T": p.t.label, "S": p.s.label, "case": "unclassified"} for p in kept],
    }
