"""Edge and vertex matching diagrams of a dissection, and the checks built on them.

The **edge diagram** has a node for every cut-graph edge of both targets and a
link for every piece side, joining the two edges the side lies on.  A side
that runs straight through a flat vertex spans several edges; it gets a node
of its own (a *flat node*).  Edges covered on both sides only by such longer
sides carry no link and are dropped.

The **vertex diagram** has a node for every cut-graph vertex of both targets
and a link for every piece corner, joining the two vertices the corner sits
at.  Each node is weighted by the total angle gathered there.

:func:`check_all` runs the necessary conditions every valid dissection
without flipped pieces satisfies; each result names the statement it checks
in its ``ref`` field.
"""

from __future__ import annotations

import html
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .cutgraph import CutGraph, VertexType
from .dissection import Dissection, classify_target
from .geom import Angle, Point, Segment, cross, point_on_segment
from .kernel import Scalar, sign, sqrt

__all__ = [
    "CorrespondenceError",
    "EDNode",
    "EDLink",
    "EdgeMatchingDiagram",
    "VDNode",
    "VDLink",
    "VertexMatchingDiagram",
    "build_edge_diagram",
    "build_vertex_diagram",
    "CheckResult",
    "CheckReport",
    "eg_length",
    "vg_angle",
    "vg_anglesum",
    "vg_component",
    "side_component",
    "eg_to_vg",
    "adjacent",
    "alternate",
    "monochromatic_consistency",
    "useful",
    "check_all",
    "ComponentShape",
    "classify_components",
    "SideClassification",
    "side_classification",
    "is_well_behaved",
    "AlongSequence",
    "AlongSequenceError",
    "along_sequence",
    "well_behaved_paths",
    "u_shape_analysis",
    "to_dot",
    "to_svg",
]

REF_EG_LENGTH = "Observation EG-length"
REF_VG_ANGLE = "Observation VG-angle"
REF_VG_ANGLESUM = "Observation VG-anglesum"
REF_VG_COMPONENT = "Lemma VG-component"
REF_SIDE_COMPONENT = "Lemma side-component"
REF_EG_TO_VG = "Lemma EGtoVG"
REF_ADJACENT = "Lemma adjacent"
REF_ALTERNATE = "Lemma alternate"
REF_MONOCHROMATIC = "Proposition monotone"
REF_U_SHAPE = "Lemma U-shape"
REF_USEFUL = "Lemma useful"

TARGETS = ("P", "Pprime")


class CorrespondenceError(ValueError):
    """A piece side or corner has no matching cut-graph element."""


# ---------------------------------------------------------------------------
# edge diagram
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EDNode:
    which: str
    kind: str  # boundary | internal | flat
    edge: int | None  # cut-graph edge for boundary and internal nodes
    side: tuple[int, int] | None  # (piece, side) for flat nodes
    length2: Scalar
    trisected_mid: bool = False

    @property
    def id(self) -> str:
        if self.kind == "flat":
            return f"{self.which}:flat{self.side[0]}.{self.side[1]}"
        return f"{self.which}:e{self.edge}"


@dataclass(frozen=True)
class EDLink:
    side: tuple[int, int]  # (piece, side index)
    ends: tuple[int, int]  # node index in P, node index in Pprime
    length2: Scalar

    @property
    def id(self) -> str:
        return f"s{self.side[0]}.{self.side[1]}"


@dataclass
class EdgeMatchingDiagram:
    dissection: Dissection
    graphs: dict[str, CutGraph]
    nodes: list[EDNode]
    links: list[EDLink]
    removed: list[tuple[str, int]]  # (target, edge) dropped because no side matches the edge
    link_of_side: dict[tuple[int, int], int] = field(default_factory=dict)
    node_of_edge: dict[tuple[str, int], int] = field(default_factory=dict)

    def node_links(self, n: int) -> list[int]:
        return [i for i, link in enumerate(self.links) if n in link.ends]

    def degree(self, n: int) -> int:
        return len(self.node_links(n))

    def components(self) -> list["EDPath"]:
        """Connected components, each as an alternating node/link walk."""
        incident: dict[int, list[int]] = {n: [] for n in range(len(self.nodes))}
        for i, link in enumerate(self.links):
            for n in link.ends:
                incident[n].append(i)
        seen_links: set[int] = set()
        seen_nodes: set[int] = set()
        out = []
        starts = [n for n in range(len(self.nodes)) if len(incident[n]) == 1]
        starts += [n for n in range(len(self.nodes)) if len(incident[n]) != 1]
        for start in starts:
            if start in seen_nodes:
                continue
            walk_nodes = [start]
            walk_links: list[int] = []
            seen_nodes.add(start)
            cur = start
            cyclic = False
            while True:
                nxt = [l for l in incident[cur] if l not in seen_links]
                if not nxt:
                    break
                l = nxt[0]
                seen_links.add(l)
                walk_links.append(l)
                a, b = self.links[l].ends
                cur = b if a == cur else a
                if cur in seen_nodes:
                    cyclic = True
                    break
                seen_nodes.add(cur)
                walk_nodes.append(cur)
            out.append(EDPath(walk_nodes, walk_links, cyclic))
        return out

    def to_json(self) -> dict[str, Any]:
        return {
            "nodes": [
                {
                    "id": n.id,
                    "kind": "trisected-mid" if n.trisected_mid else n.kind,
                    "length": float(sqrt(n.length2)),
                    "degree": self.degree(k),
                }
                for k, n in enumerate(self.nodes)
            ],
            "links": [
                {"id": l.id, "ends": [self.nodes[a].id for a in l.ends], "length": float(sqrt(l.length2))}
                for l in self.links
            ],
            "removed": [f"{w}:e{e}" for w, e in self.removed],
            "components": [
                {"nodes": [self.nodes[n].id for n in c.nodes], "cycle": c.cyclic} for c in self.components()
            ],
        }

    def path_of_link(self, link: int) -> "EDPath":
        for comp in self.components():
            if link in comp.links:
                return comp
        raise KeyError(link)

    def far_end(self, link: int, from_node: int) -> tuple[int, int, list[int]]:
        """Walk from ``link`` away from ``from_node`` to the end of its path.

        Returns ``(last link, leaf node, links walked)``.
        """
        walked = [link]
        cur_link = link
        a, b = self.links[link].ends
        node = b if a == from_node else a
        while True:
            others = [l for l in self.node_links(node) if l != cur_link]
            if not others or others[0] == link:
                return cur_link, node, walked
            cur_link = others[0]
            walked.append(cur_link)
            a, b = self.links[cur_link].ends
            node = b if a == node else a


@dataclass
class EDPath:
    nodes: list[int]
    links: list[int]
    cyclic: bool = False


def _placed_side(d: Dissection, which: str, side: tuple[int, int]) -> tuple[Point, Point]:
    poly = d.placed(which)[side[0]]
    j = side[1]
    return poly.corners[j], poly.corners[(j + 1) % len(poly.corners)]


def _trisected_mids(g: CutGraph) -> set[int]:
    """Boundary edges in the middle of a target side cut into three equal parts."""
    out: set[int] = set()
    cycle = g.boundary_cycle()
    corners = [k for k, v in enumerate(cycle) if g.vertices[v].type == VertexType.CORNER]
    for a, b in zip(corners, corners[1:] + [corners[0] + len(cycle)]):
        run = [cycle[k % len(cycle)] for k in range(a, b + 1)]
        if len(run) != 4:
            continue
        edges = [g.edge_between(u, v) for u, v in zip(run, run[1:])]
        lengths = [(g.vertices[u].point - g.vertices[v].point).norm2() for u, v in zip(run, run[1:])]
        if sign(lengths[0] - lengths[1]) == 0 and sign(lengths[1] - lengths[2]) == 0:
            out.add(edges[1])
    return out


def build_edge_diagram(d: Dissection, gP: CutGraph, gQ: CutGraph) -> EdgeMatchingDiagram:
    graphs = {"P": gP, "Pprime": gQ}
    nodes: list[EDNode] = []
    node_of_edge: dict[tuple[str, int], int] = {}
    flat_node: dict[tuple[str, tuple[int, int]], int] = {}
    for which, g in graphs.items():
        mids = _trisected_mids(g)
        for e, edge in enumerate(g.edges):
            pu, pv = g.vertices[edge.u].point, g.vertices[edge.v].point
            node_of_edge[(which, e)] = len(nodes)
            nodes.append(EDNode(which, edge.kind, e, None, (pu - pv).norm2(), e in mids))

    ends: dict[tuple[int, int], dict[str, int]] = {}
    for which, g in graphs.items():
        for i, poly in enumerate(d.placed(which)):
            for j in range(len(poly.corners)):
                a, b = _placed_side(d, which, (i, j))
                inner = [
                    k for k, vert in enumerate(g.vertices)
                    if (i, j) in vert.through
                ]
                if inner:
                    flat_node[(which, (i, j))] = len(nodes)
                    nodes.append(EDNode(which, "flat", None, (i, j), (a - b).norm2()))
                    ends.setdefault((i, j), {})[which] = flat_node[(which, (i, j))]
                    continue
                try:
                    u, v = g.vertex_at(a), g.vertex_at(b)
                except KeyError:
                    u = v = None
                e = None if u is None else g.edge_between(u, v)
                if e is None:
                    raise CorrespondenceError(f"side {j} of piece {i} matches no edge of the cut graph of {which}")
                ends.setdefault((i, j), {})[which] = node_of_edge[(which, e)]

    links: list[EDLink] = []
    link_of_side: dict[tuple[int, int], int] = {}
    for i, poly in enumerate(d.pieces):
        for j in range(len(poly.corners)):
            e = ends.get((i, j), {})
            if "P" not in e or "Pprime" not in e:
                raise CorrespondenceError(f"side {j} of piece {i} is missing from a target")
            a, b = poly.corners[j], poly.corners[(j + 1) % len(poly.corners)]
            link_of_side[(i, j)] = len(links)
            links.append(EDLink((i, j), (e["P"], e["Pprime"]), (a - b).norm2()))

    used = {n for link in links for n in link.ends}
    keep = [n for n in range(len(nodes)) if n in used]
    removed = []
    for n, node in enumerate(nodes):
        if n in used:
            continue
        g = graphs[node.which]
        edge = g.edges[node.edge]
        both_flat = all(g.vertices[x].type == VertexType.FLAT for x in (edge.u, edge.v))
        covered = _covered_both_sides(d, node.which, g, node.edge)
        if not (both_flat and covered):
            raise CorrespondenceError(f"edge {node.edge} of {node.which} matches no piece side")
        removed.append((node.which, node.edge))
    remap = {old: new for new, old in enumerate(keep)}
    nodes = [nodes[n] for n in keep]
    links = [EDLink(l.side, (remap[l.ends[0]], remap[l.ends[1]]), l.length2) for l in links]
    node_of_edge = {k: remap[v] for k, v in node_of_edge.items() if v in remap}
    diagram = EdgeMatchingDiagram(d, graphs, nodes, links, removed, link_of_side, node_of_edge)
    for n in range(len(diagram.nodes)):
        if diagram.degree(n) not in (1, 2):
            raise CorrespondenceError(f"node {diagram.nodes[n].id} has degree {diagram.degree(n)}")
    return diagram


def _covered_both_sides(d: Dissection, which: str, g: CutGraph, e: int) -> bool:
    """Both sides of edge ``e`` lie along piece sides that pass straight through its ends."""
    edge = g.edges[e]
    pu, pv = g.vertices[edge.u].point, g.vertices[edge.v].point
    count = 0
    for i, poly in enumerate(d.placed(which)):
        for j in range(len(poly.corners)):
            a, b = _placed_side(d, which, (i, j))
            s = Segment(a, b)
            if point_on_segment(pu, s) and point_on_segment(pv, s) and not {a, b} == {pu, pv}:
                count += 1
    return count >= 2


# ---------------------------------------------------------------------------
# vertex diagram
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VDNode:
    which: str
    vertex: int
    type: VertexType
    weight: Angle  # gathered angle total
    expected: Angle  # the weight the vertex type prescribes

    @property
    def id(self) -> str:
        return f"{self.which}:v{self.vertex}"


@dataclass(frozen=True)
class VDLink:
    corner: tuple[int, int]  # (piece, corner index)
    ends: tuple[int, int]  # node in P, node in Pprime
    angle: Angle

    @property
    def id(self) -> str:
        return f"c{self.corner[0]}.{self.corner[1]}"


@dataclass
class VertexMatchingDiagram:
    dissection: Dissection
    graphs: dict[str, CutGraph]
    nodes: list[VDNode]
    links: list[VDLink]
    node_of_vertex: dict[tuple[str, int], int]
    link_of_corner: dict[tuple[int, int], int]

    def node_links(self, n: int) -> list[int]:
        return [i for i, link in enumerate(self.links) if n in link.ends]

    def degree(self, n: int) -> int:
        return len(self.node_links(n))

    def other(self, link: int, node: int) -> int:
        a, b = self.links[link].ends
        return b if a == node else a

    def components(self) -> list[tuple[list[int], list[int]]]:
        """Connected components as (sorted node list, sorted link list)."""
        parent = list(range(len(self.nodes)))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for link in self.links:
            a, b = (find(x) for x in link.ends)
            if a != b:
                parent[max(a, b)] = min(a, b)
        groups: dict[int, list[int]] = {}
        for n in range(len(self.nodes)):
            groups.setdefault(find(n), []).append(n)
        out = []
        for root in sorted(groups):
            members = groups[root]
            ls = sorted(i for i, link in enumerate(self.links) if find(link.ends[0]) == root)
            out.append((members, ls))
        return out

    def to_json(self) -> dict[str, Any]:
        return {
            "nodes": [
                {"id": n.id, "type": n.type.value, "weight": _angle_label(n.weight), "degree": self.degree(k)}
                for k, n in enumerate(self.nodes)
            ],
            "links": [
                {"id": l.id, "ends": [self.nodes[a].id for a in l.ends], "angle": _angle_label(l.angle)}
                for l in self.links
            ],
            "components": [s.to_json(self) for s in classify_components(self)],
        }

    def component_index(self) -> dict[int, int]:
        """Node -> component number."""
        out = {}
        for k, (members, _) in enumerate(self.components()):
            for n in members:
                out[n] = k
        return out


def _expected_weight(g: CutGraph, v: int) -> Angle:
    vert = g.vertices[v]
    if vert.type in (VertexType.PAIRED, VertexType.CONVEX, VertexType.REFLEX):
        return Angle.of_pi(2)
    if vert.type in (VertexType.FLAT, VertexType.SIDE):
        return Angle.of_pi(1)
    return g.target.angles[vert.target_corner].angle


def build_vertex_diagram(d: Dissection, gP: CutGraph, gQ: CutGraph) -> VertexMatchingDiagram:
    graphs = {"P": gP, "Pprime": gQ}
    nodes: list[VDNode] = []
    node_of_vertex: dict[tuple[str, int], int] = {}
    corner_node: dict[tuple[str, tuple[int, int]], int] = {}
    for which, g in graphs.items():
        for v, vert in enumerate(g.vertices):
            total = Angle.zero()
            for (i, j), a in zip(vert.corners, vert.angles):
                total = total + a
                corner_node[(which, (i, j))] = len(nodes)
            node_of_vertex[(which, v)] = len(nodes)
            nodes.append(VDNode(which, v, vert.type, total, _expected_weight(g, v)))
    links = []
    link_of_corner = {}
    for i, poly in enumerate(d.pieces):
        angles = poly.angles
        for j in range(len(poly.corners)):
            try:
                a, b = corner_node[("P", (i, j))], corner_node[("Pprime", (i, j))]
            except KeyError as exc:
                raise CorrespondenceError(f"corner {j} of piece {i} matches no cut-graph vertex") from exc
            link_of_corner[(i, j)] = len(links)
            links.append(VDLink((i, j), (a, b), angles[j].angle))
    return VertexMatchingDiagram(d, graphs, nodes, links, node_of_vertex, link_of_corner)


# ---------------------------------------------------------------------------
# check results
# ---------------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    ref: str
    status: str  # pass | fail | precondition unmet | vacuous
    checked: int = 0
    witnesses: list[dict[str, Any]] = field(default_factory=list)
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status != "fail"

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"name": self.name, "ref": self.ref, "status": self.status, "checked": self.checked}
        if self.witnesses:
            doc["witnesses"] = self.witnesses
        if self.detail:
            doc["detail"] = self.detail
        return doc


def _result(name: str, ref: str, checked: int, witnesses: list[dict[str, Any]], detail: str = "") -> CheckResult:
    status = "fail" if witnesses else ("pass" if checked else "vacuous")
    return CheckResult(name, ref, status, checked, witnesses, detail)


@dataclass
class CheckReport:
    results: list[CheckResult]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def __getitem__(self, name: str) -> CheckResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_json(self) -> dict[str, Any]:
        return {"ok": self.ok, "checks": [r.to_json() for r in self.results]}


def _cw_next(side: tuple[int, int]) -> tuple[int, int]:
    """Corner at the start of a counterclockwise side (clockwise next)."""
    return side


def _ccw_next(d: Dissection, side: tuple[int, int]) -> tuple[int, int]:
    i, j = side
    return (i, (j + 1) % len(d.pieces[i].corners))


def _link_component(vd: VertexMatchingDiagram) -> dict[tuple[int, int], int]:
    comp = vd.component_index()
    return {link.corner: comp[link.ends[0]] for link in vd.links}


# ---------------------------------------------------------------------------
# individual checks
# ---------------------------------------------------------------------------

def eg_length(ed: EdgeMatchingDiagram) -> CheckResult:
    """All sides along one edge-diagram path have equal length."""
    bad = []
    comps = ed.components()
    for comp in comps:
        lengths = [ed.links[l].length2 for l in comp.links]
        for l, x in zip(comp.links[1:], lengths[1:]):
            if sign(x - lengths[0]) != 0:
                bad.append({"path": [ed.links[k].id for k in comp.links], "side": ed.links[l].id})
                break
    return _result("eg_length", REF_EG_LENGTH, len(comps), bad)


def _paired_chains(vd: VertexMatchingDiagram) -> list[list[int]]:
    """Maximal runs of paired nodes, each given by its links in order.

    A run n1..nk of paired nodes gives the links l0, l1, ..., lk where l0 and
    lk lead out of the run; runs that close up into a cycle are skipped.
    """
    paired = {n for n, node in enumerate(vd.nodes) if node.type == VertexType.PAIRED}
    seen: set[int] = set()
    chains = []
    for start in sorted(paired):
        if start in seen:
            continue
        seen.add(start)
        first, second = vd.node_links(start)
        halves = []
        closed = False
        for link in (first, second):
            half = [link]
            cur = vd.other(link, start)
            while cur in paired and cur != start:
                seen.add(cur)
                link = next(l for l in vd.node_links(cur) if l != link)
                half.append(link)
                cur = vd.other(link, cur)
            closed = closed or cur == start
            halves.append(half)
        if not closed:
            chains.append(halves[0][::-1] + halves[1])
    return chains


def vg_angle(vd: VertexMatchingDiagram) -> CheckResult:
    """Corners at the two ends of a run of paired nodes are equal or supplementary to 2 pi."""
    bad = []
    checked = 0
    full = Angle.of_pi(2)
    for chain in _paired_chains(vd):
        for a, b in itertools.combinations(range(len(chain)), 2):
            between = b - a  # number of paired nodes separating the two corners
            x, y = vd.links[chain[a]].angle, vd.links[chain[b]].angle
            ok = (x + y == full) if between % 2 else (x == y)
            checked += 1
            if not ok:
                bad.append({"corners": [vd.links[chain[a]].id, vd.links[chain[b]].id], "nodes_between": between})
    return _result("vg_angle", REF_VG_ANGLE, checked, bad)


def _angle_sum(angles: Iterable[Angle]) -> Angle:
    total = Angle.zero()
    for a in angles:
        total = total + a
    return total


def vg_anglesum(vd: VertexMatchingDiagram) -> CheckResult:
    """Per component the node weights on the two sides agree; each weight matches its vertex type.

    Node weights are first compared with the value their vertex type
    prescribes; component totals then add the prescribed values, which keeps
    the exact sums short.  A node with an unexpected weight contributes its
    gathered total instead.
    """
    bad = []
    weight = []
    for node in vd.nodes:
        if node.weight == node.expected:
            weight.append(node.expected)
        else:
            weight.append(node.weight)
            bad.append({"node": node.id, "type": node.type.value, "weight": node.weight.to_float(), "expected": node.expected.to_float()})
    comps = vd.components()
    for members, _ in comps:
        left = _angle_sum(weight[n] for n in members if vd.nodes[n].which == "P")
        right = _angle_sum(weight[n] for n in members if vd.nodes[n].which == "Pprime")
        if left != right:
            bad.append({"component": [vd.nodes[n].id for n in members], "P": left.to_float(), "Pprime": right.to_float()})
    # the link angles of each piece add up to its interior angle total
    for i, poly in enumerate(vd.dissection.pieces):
        total = _angle_sum(vd.links[vd.link_of_corner[(i, j)]].angle for j in range(len(poly.corners)))
        if total != Angle.of_pi(len(poly.corners) - 2):
            bad.append({"piece": i, "links_total": total.to_float()})
    checked = len(vd.nodes) + len(comps) + len(vd.dissection.pieces)
    return _result("vg_anglesum", REF_VG_ANGLESUM, checked, bad)


def vg_component(vd: VertexMatchingDiagram) -> CheckResult:
    """Each component holds all triangle corners or none, and an even number of square corners."""
    kinds = {w: classify_target(vd.dissection.target(w)) for w in TARGETS}
    if sorted(kinds.values(), key=str) != ["S", "T"]:
        return CheckResult("vg_component", REF_VG_COMPONENT, "vacuous", detail="targets are not one triangle and one square")
    bad = []
    comps = vd.components()
    for members, _ in comps:
        t = sum(1 for n in members if vd.nodes[n].type == VertexType.CORNER and kinds[vd.nodes[n].which] == "T")
        s = sum(1 for n in members if vd.nodes[n].type == VertexType.CORNER and kinds[vd.nodes[n].which] == "S")
        if t not in (0, 3) or s % 2:
            bad.append({"component": [vd.nodes[n].id for n in members], "triangle_corners": t, "square_corners": s})
    return _result("vg_component", REF_VG_COMPONENT, len(comps), bad)


def _link_pairs_on_paths(ed: EdgeMatchingDiagram) -> Iterable[tuple[int, int, int]]:
    """Pairs of links on a common edge path with the number of nodes shared between them."""
    for comp in ed.components():
        for a, b in itertools.combinations(range(len(comp.links)), 2):
            yield comp.links[a], comp.links[b], b - a


def side_component(ed: EdgeMatchingDiagram, vd: VertexMatchingDiagram) -> CheckResult:
    """Next corners of two sides on one edge path pair up crosswise after an odd number of steps."""
    comp = _link_component(vd)
    d = ed.dissection
    bad = []
    checked = 0
    for la, lb, steps in _link_pairs_on_paths(ed):
        e, f = ed.links[la].side, ed.links[lb].side
        v1, v2 = comp[_cw_next(e)], comp[_ccw_next(d, e)]
        w1, w2 = comp[_cw_next(f)], comp[_ccw_next(d, f)]
        expect = (w2, w1) if steps % 2 else (w1, w2)
        checked += 1
        if (v1, v2) != expect:
            bad.append({"sides": [ed.links[la].id, ed.links[lb].id], "steps": steps})
    return _result("side_component", REF_SIDE_COMPONENT, checked, bad)


def eg_to_vg(ed: EdgeMatchingDiagram, vd: VertexMatchingDiagram) -> CheckResult:
    """Next corners of two sides on one edge path are joined in pairs by vertex-diagram paths."""
    comp = _link_component(vd)
    d = ed.dissection
    bad = []
    checked = 0
    for la, lb, _ in _link_pairs_on_paths(ed):
        e, f = ed.links[la].side, ed.links[lb].side
        v = (comp[_cw_next(e)], comp[_ccw_next(d, e)])
        w = (comp[_cw_next(f)], comp[_ccw_next(d, f)])
        checked += 1
        if v != w and v != (w[1], w[0]):
            bad.append({"sides": [ed.links[la].id, ed.links[lb].id]})
    return _result("eg_to_vg", REF_EG_TO_VG, checked, bad)


def adjacent(ed: EdgeMatchingDiagram, vd: VertexMatchingDiagram) -> CheckResult:
    """Boundary edges with a common end joined by an edge path force a cycle at that end."""
    bad = []
    checked = 0
    shapes = {tuple(s.nodes): s for s in classify_components(vd)}
    comp_of = vd.component_index()
    comps = vd.components()
    for comp in ed.components():
        ends = [comp.nodes[0], comp.nodes[-1]] if not comp.cyclic else []
        if len(ends) != 2 or ends[0] == ends[1]:
            continue
        a, b = (ed.nodes[n] for n in ends)
        if a.kind != "boundary" or b.kind != "boundary" or a.which != b.which:
            continue
        g = ed.graphs[a.which]
        ea, eb = g.edges[a.edge], g.edges[b.edge]
        common = {ea.u, ea.v} & {eb.u, eb.v}
        for v in common:
            checked += 1
            members = comps[comp_of[vd.node_of_vertex[(a.which, v)]]][0]
            shape = shapes[tuple(members)]
            if shape.kind in ("path", "tree"):
                bad.append({"edges": [a.id, b.id], "vertex": f"{a.which}:v{v}", "shape": shape.kind})
    return _result("adjacent", REF_ADJACENT, checked, bad)


def monochromatic_consistency(ed: EdgeMatchingDiagram, vd: VertexMatchingDiagram) -> CheckResult:
    sc = side_classification(ed, vd)
    bad = []
    comps = ed.components()
    for comp in comps:
        flags = {sc.monochromatic[ed.links[l].side] for l in comp.links}
        if len(flags) > 1:
            bad.append({"path": [ed.links[l].id for l in comp.links]})
    return _result("monochromatic", REF_MONOCHROMATIC, len(comps), bad)


# ---------------------------------------------------------------------------
# component shapes and side classes
# ---------------------------------------------------------------------------

@dataclass
class ComponentShape:
    kind: str  # path | cycle | tree | tadpole | other
    nodes: list[int]
    links: list[int]
    endpoints: list[int] = field(default_factory=list)  # path ends (one node for an isolated node)
    leaves: int = 0
    max_degree: int = 0

    def to_json(self, vd: VertexMatchingDiagram | None = None) -> dict[str, Any]:
        name = (lambda n: vd.nodes[n].id) if vd else (lambda n: n)
        return {
            "kind": self.kind,
            "nodes": [name(n) for n in self.nodes],
            "links": len(self.links),
            "endpoints": [name(n) for n in self.endpoints],
            "leaves": self.leaves,
            "max_degree": self.max_degree,
        }


def classify_components(vd: VertexMatchingDiagram) -> list[ComponentShape]:
    """Shape of each vertex-diagram component; an isolated node is a path of length 0."""
    out = []
    for members, links in vd.components():
        deg = {n: 0 for n in members}
        for l in links:
            for n in vd.links[l].ends:
                deg[n] += 1
        v, e = len(members), len(links)
        leaves = sorted(n for n in members if deg[n] == 1)
        maxd = max(deg.values())
        if e == v - 1:
            if maxd <= 2:
                ends = leaves if leaves else list(members)
                out.append(ComponentShape("path", members, links, ends, len(leaves), maxd))
            else:
                out.append(ComponentShape("tree", members, links, [], len(leaves), maxd))
        elif e == v and maxd == 2 and min(deg.values()) == 2:
            out.append(ComponentShape("cycle", members, links, [], 0, maxd))
        elif e == v and len(leaves) == 1 and sorted(deg.values()).count(3) == 1 and maxd == 3:
            out.append(ComponentShape("tadpole", members, links, leaves, 1, maxd))
        else:
            out.append(ComponentShape("other", members, links, [], len(leaves), maxd))
    return out


@dataclass
class SideClassification:
    monochromatic: dict[tuple[int, int], bool]
    divide_in_two: set[int]  # vertex-diagram nodes
    buried: set[int]

    def to_json(self, vd: VertexMatchingDiagram) -> dict[str, Any]:
        return {
            "monochromatic": sorted(f"s{i}.{j}" for (i, j), m in self.monochromatic.items() if m),
            "divide_in_two": sorted(vd.nodes[n].id for n in self.divide_in_two),
            "buried": sorted(vd.nodes[n].id for n in self.buried),
        }


def _boundary_neighbours(g: CutGraph, v: int) -> list[int]:
    return [
        w for w in g.neighbours(v)
        if g.edges[g.edge_between(v, w)].kind == "boundary"
    ]


def _through_neighbours(g: CutGraph, v: int) -> list[int]:
    """The two neighbours of a flat vertex along the side that passes through it."""
    vert = g.vertices[v]
    here = vert.point
    out = []
    for w in g.neighbours(v):
        e = g.edges[g.edge_between(v, w)]
        if any(s in vert.through for s in e.sides):
            out.append(w)
    if len(out) != 2:
        # fall back to collinear neighbours
        out = [
            w for w in g.neighbours(v)
            for x in g.neighbours(v)
            if w < x and sign(cross(g.vertices[w].point - here, g.vertices[x].point - here)) == 0
        ][:2]
    return out


def side_classification(ed: EdgeMatchingDiagram, vd: VertexMatchingDiagram) -> SideClassification:
    comp = _link_component(vd)
    d = ed.dissection
    mono = {}
    for i, poly in enumerate(d.pieces):
        for j in range(len(poly.corners)):
            mono[(i, j)] = comp[(i, j)] == comp[_ccw_next(d, (i, j))]
    dit: set[int] = set()
    bur: set[int] = set()
    for n, node in enumerate(vd.nodes):
        g = vd.graphs[node.which]
        v = node.vertex
        types = lambda ws: [g.vertices[w].type for w in ws]  # noqa: E731
        if node.type == VertexType.SIDE:
            nb = _boundary_neighbours(g, v)
            if len(nb) == 2 and all(t == VertexType.CORNER for t in types(nb)):
                dit.add(n)
        elif node.type == VertexType.FLAT:
            nb = _through_neighbours(g, v)
            if len(nb) == 2 and all(t == VertexType.PAIRED for t in types(nb)):
                dit.add(n)
        elif node.type == VertexType.PAIRED:
            nb = g.neighbours(v)
            if all(t != VertexType.FLAT for t in types(nb)):
                bur.add(n)
    return SideClassification(mono, dit, bur)


def is_well_behaved(path: Sequence[int], sc: SideClassification) -> bool:
    """Every inner node of the vertex-diagram path is divide-in-two or buried."""
    return all(n in sc.divide_in_two or n in sc.buried for n in path[1:-1])


# ---------------------------------------------------------------------------
# along sequences
# ---------------------------------------------------------------------------

@dataclass
class AlongSequence:
    start_side: tuple[int, int]
    paths: list[list[str]]  # node ids of each edge path M_1..M_k
    divided: list[str]  # divide-in-two vertices splitting L_1..L_{k-1}
    start: str  # edge-diagram node e
    end: str  # edge-diagram node e'
    terms: list[Scalar]  # |e|, |L_1|, ..., |e'|
    alternating_sum: Scalar
    squared_ends: tuple[Scalar, Scalar]  # |e|^2 and |e'|^2

    @property
    def zero(self) -> bool:
        if len(self.terms) == 2:
            # |e| - |e'| vanishes exactly when the squares agree, a shorter test
            return sign(self.squared_ends[0] - self.squared_ends[1]) == 0
        return sign(self.alternating_sum) == 0

    def to_json(self) -> dict[str, Any]:
        return {
            "start_side": f"s{self.start_side[0]}.{self.start_side[1]}",
            "start": self.start,
            "end": self.end,
            "paths": self.paths,
            "divided": self.divided,
            "terms": [float(t) for t in self.terms],
            "alternating_sum": float(self.alternating_sum),
            "exact_zero": self.zero,
        }


class AlongSequenceError(ValueError):
    """The path is not well-behaved or its edge paths do not chain."""


def _split_partner(g: CutGraph, edge: int, q: int) -> tuple[int, Scalar] | None:
    """At vertex ``q``, the edge continuing ``edge`` straight on, and the length of the two together."""
    e = g.edges[edge]
    if q not in (e.u, e.v):
        return None
    far = e.v if e.u == q else e.u
    here = g.vertices[q].point
    for w in g.neighbours(q):
        if w == far:
            continue
        d1 = g.vertices[far].point - here
        d2 = g.vertices[w].point - here
        if sign(cross(d1, d2)) == 0 and sign(d1.x * d2.x + d1.y * d2.y) < 0:
            total = sqrt((g.vertices[far].point - g.vertices[w].point).norm2())
            return g.edge_between(q, w), total
    return None


def _path_ends(ed: EdgeMatchingDiagram, node: int) -> tuple[list[int], bool]:
    """Nodes of the edge path through ``node`` in order, and whether it is a cycle."""
    for comp in ed.components():
        if node in comp.nodes:
            return comp.nodes, comp.cyclic
    raise KeyError(node)


def _touches(ed: EdgeMatchingDiagram, node: int, vd: VertexMatchingDiagram, q: int) -> bool:
    n, v = ed.nodes[node], vd.nodes[q]
    if n.edge is None or n.which != v.which:
        return False
    edge = ed.graphs[n.which].edges[n.edge]
    return v.vertex in (edge.u, edge.v)


def along_sequence(
    vd: VertexMatchingDiagram,
    ed: EdgeMatchingDiagram,
    path: Sequence[int],
    start_side: tuple[int, int],
    sc: SideClassification | None = None,
) -> AlongSequence:
    """Chain edge paths from ``start_side`` through the divide-in-two nodes of ``path``.

    ``path`` lists vertex-diagram nodes p_1..p_k; ``start_side`` is a side of
    a piece corner linking p_1 and p_2.  The first edge path is the one
    holding that side; its end e is the one away from the first
    divide-in-two vertex q_1, and its other end must be an edge at q_1.  The
    next edge path starts from the edge continuing straight on through q_1,
    and so on; the last path ends at e'.  The lengths |e|, |L_1|, ..., |e'|
    have alternating sum zero, where L_i is the segment split by q_i.
    """
    sc = sc or side_classification(ed, vd)
    if len(path) < 2:
        raise AlongSequenceError("path needs at least one link")
    if not is_well_behaved(path, sc):
        raise AlongSequenceError("path is not well-behaved")
    d = ed.dissection
    i, j = start_side
    n_corners = len(d.pieces[i].corners)
    first = [
        l for l in vd.node_links(path[0])
        if vd.other(l, path[0]) == path[1] and vd.links[l].corner in ((i, j), (i, (j + 1) % n_corners))
    ]
    if not first:
        raise AlongSequenceError("start side is not a side of a corner linking the first two nodes")
    dit_nodes = [n for n in path[1:-1] if n in sc.divide_in_two]

    nodes, cyclic = _path_ends(ed, ed.links[ed.link_of_side[start_side]].ends[0])
    if cyclic:
        raise AlongSequenceError("the edge path of the start side is a cycle")
    if dit_nodes and _touches(ed, nodes[0], vd, dit_nodes[0]):
        nodes = nodes[::-1]
    start = nodes[0]
    paths = [[ed.nodes[n].id for n in nodes]]
    terms: list[Scalar] = [sqrt(ed.nodes[start].length2)]
    divided: list[str] = []
    leaf = nodes[-1]
    for q in dit_nodes:
        qnode = vd.nodes[q]
        if not _touches(ed, leaf, vd, q):
            raise AlongSequenceError(f"edge path ends at {ed.nodes[leaf].id}, not at an edge through {qnode.id}")
        split = _split_partner(ed.graphs[qnode.which], ed.nodes[leaf].edge, qnode.vertex)
        if split is None:
            raise AlongSequenceError(f"nothing continues {ed.nodes[leaf].id} straight through {qnode.id}")
        other_edge, total = split
        nxt = ed.node_of_edge.get((qnode.which, other_edge))
        if nxt is None:
            raise AlongSequenceError(f"no edge path continues through {qnode.id}")
        nodes, cyclic = _path_ends(ed, nxt)
        if cyclic or nxt not in (nodes[0], nodes[-1]):
            raise AlongSequenceError(f"edge {ed.nodes[nxt].id} is not the end of an edge path")
        if nodes[0] != nxt:
            nodes = nodes[::-1]
        terms.append(total)
        divided.append(qnode.id)
        paths.append([ed.nodes[n].id for n in nodes])
        leaf = nodes[-1]
    terms.append(sqrt(ed.nodes[leaf].length2))
    alt = terms[0]
    for k, t in enumerate(terms[1:], start=1):
        alt = alt - t if k % 2 else alt + t
    ends = (ed.nodes[start].length2, ed.nodes[leaf].length2)
    return AlongSequence(start_side, paths, divided, ed.nodes[start].id, ed.nodes[leaf].id, terms, alt, ends)


def well_behaved_paths(vd: VertexMatchingDiagram, sc: SideClassification) -> list[list[int]]:
    """Every simple vertex-diagram path with at least one link whose inner nodes are divide-in-two or buried.

    Each path appears once per direction, so every end serves as a start.
    """
    inner = sc.divide_in_two | sc.buried
    out: list[list[int]] = []

    def grow(path: list[int]) -> None:
        out.append(list(path))
        cur = path[-1]
        if len(path) > 1 and cur not in inner:
            return
        for nxt in sorted({vd.other(l, cur) for l in vd.node_links(cur)}):
            if nxt not in path:
                path.append(nxt)
                grow(path)
                path.pop()

    for n in range(len(vd.nodes)):
        for nxt in sorted({vd.other(l, n) for l in vd.node_links(n)}):
            grow([n, nxt])
    return out


def alternate(ed: EdgeMatchingDiagram, vd: VertexMatchingDiagram) -> CheckResult:
    """Along sequences of every well-behaved path have alternating sum zero."""
    sc = side_classification(ed, vd)
    d = ed.dissection
    bad = []
    unmet = 0
    checked = 0
    verdicts: dict[tuple, bool] = {}
    for path in well_behaved_paths(vd, sc):
        starts = set()
        for l in vd.node_links(path[0]):
            if vd.other(l, path[0]) != path[1]:
                continue
            i, j = vd.links[l].corner
            starts.update({(i, j), (i, (j - 1) % len(d.pieces[i].corners))})
        for side in sorted(starts):
            try:
                seq = along_sequence(vd, ed, path, side, sc)
            except AlongSequenceError:
                unmet += 1
                continue
            checked += 1
            key = (seq.start, seq.end, tuple(seq.divided), tuple(map(tuple, seq.paths)))
            if key not in verdicts:
                verdicts[key] = seq.zero
            if not verdicts[key]:
                witness = seq.to_json()
                witness["path"] = [vd.nodes[n].id for n in path]
                bad.append(witness)
    result = _result("alternate", REF_ALTERNATE, checked, bad)
    if unmet:
        result.detail = f"{unmet} start sides whose edge paths do not chain through the divide-in-two nodes"
    return result


def _monochromatic_ed_nodes(ed: EdgeMatchingDiagram, sc: SideClassification) -> set[int]:
    """Edge-diagram nodes on a path whose two end sides are both monochromatic."""
    out: set[int] = set()
    for comp in ed.components():
        ends = (comp.links[0], comp.links[-1])
        if all(sc.monochromatic[ed.links[l].side] for l in ends):
            out.update(comp.nodes)
    return out


def useful(ed: EdgeMatchingDiagram, vd: VertexMatchingDiagram) -> CheckResult:
    """A component whose only monochromatic next sides are the two at one boundary node contains a cycle."""
    sc = side_classification(ed, vd)
    mono = _monochromatic_ed_nodes(ed, sc)

    def next_sides(n: int) -> list[int]:
        node = vd.nodes[n]
        g = vd.graphs[node.which]
        return [
            ed.node_of_edge[(node.which, g.edge_between(node.vertex, w))]
            for w in _boundary_neighbours(g, node.vertex)
            if (node.which, g.edge_between(node.vertex, w)) in ed.node_of_edge
        ]

    bad = []
    checked = 0
    for members, links in vd.components():
        flagged = [n for n in members if any(x in mono for x in next_sides(n))]
        if len(flagged) != 1:
            continue
        v = flagged[0]
        sides = next_sides(v)
        if len(sides) != 2 or not all(x in mono for x in sides):
            continue
        checked += 1
        if len(links) < len(members):
            bad.append({"component": [vd.nodes[n].id for n in members], "node": vd.nodes[v].id})
    return _result("useful", REF_USEFUL, checked, bad)


def check_all(ed: EdgeMatchingDiagram, vd: VertexMatchingDiagram) -> CheckReport:
    return CheckReport([
        eg_length(ed),
        vg_angle(vd),
        vg_anglesum(vd),
        vg_component(vd),
        side_component(ed, vd),
        eg_to_vg(ed, vd),
        adjacent(ed, vd),
        monochromatic_consistency(ed, vd),
        alternate(ed, vd),
        useful(ed, vd),
    ])


# ---------------------------------------------------------------------------
# U-shaped boundaries
# ---------------------------------------------------------------------------

def u_shape_analysis(gS: CutGraph, ed: EdgeMatchingDiagram, vd: VertexMatchingDiagram) -> dict[str, Any]:
    """U-shaped boundaries of the square and where their edge paths end.

    A U-shaped boundary is a boundary edge whose two ends are corners with a
    single piece corner each.  When both ends lie on path components, the
    edge path from the boundary edge must end at a flat node or a
    trisected-mid node.
    """
    which = gS.which
    other = "Pprime" if which == "P" else "P"
    shapes = {n: s for s in classify_components(vd) for n in s.nodes}
    rows = []
    for e, edge in enumerate(gS.edges):
        if edge.kind != "boundary":
            continue
        ends = [vd.node_of_vertex[(which, x)] for x in (edge.u, edge.v)]
        if not all(vd.nodes[n].type == VertexType.CORNER and vd.degree(n) == 1 for n in ends):
            continue
        node = ed.node_of_edge[(which, e)]
        link = ed.node_links(node)[0]
        _, leaf, _ = ed.far_end(link, node)
        far = ed.nodes[leaf]
        simple = all(shapes[n].kind == "path" for n in ends)
        hit = far.kind == "flat" or far.trisected_mid
        status = ("satisfied" if hit else "violated") if simple else "precondition unmet"
        rows.append({"edge": f"{which}:e{e}", "far_end": far.id, "far_kind": "trisected-mid" if far.trisected_mid else far.kind, "status": status})
    kinds = {w: classify_target(ed.dissection.target(w)) for w in TARGETS}
    candidates = {
        w: sum(1 for n in ed.nodes if n.which == w and (n.kind == "flat" or n.trisected_mid)) for w in TARGETS
    }
    vacuous = kinds[other] != "T"
    if vacuous:
        for r in rows:
            r["status"] = "vacuous"
    return {
        "ref": REF_U_SHAPE,
        "status": "vacuous" if vacuous else ("fail" if any(r["status"] == "violated" for r in rows) else "pass"),
        "u_shaped": len(rows),
        "boundaries": rows,
        "candidates": {"square": candidates[which], "other": candidates[other]},
        "pigeonhole": candidates[other] < len(rows),
    }


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def _angle_label(a: Angle) -> str:
    k = a.sixths()
    if k is None:
        return f"{a.to_float():.6f}"
    q = Fraction(k, 6)
    if q == 0:
        return "0"
    num = "" if q.numerator == 1 else str(q.numerator)
    return f"{num}pi" if q.denominator == 1 else f"{num}pi/{q.denominator}"


def to_dot(diagram: EdgeMatchingDiagram | VertexMatchingDiagram) -> str:
    """Graphviz source with one cluster per target; byte-stable for a fixed input."""
    is_ed = isinstance(diagram, EdgeMatchingDiagram)
    name = "edge_diagram" if is_ed else "vertex_diagram"
    lines = [f"graph {name} {{", "  rankdir=LR;", "  node [fontname=\"Helvetica\", fontsize=10];"]
    shapes = {"boundary": "box", "internal": "ellipse", "flat": "diamond"}
    for k, which in enumerate(TARGETS):
        lines.append(f"  subgraph cluster_{k} {{")
        lines.append(f"    label=\"{which}\";")
        for n, node in enumerate(diagram.nodes):
            if node.which != which:
                continue
            if is_ed:
                shape = "doubleoctagon" if node.trisected_mid else shapes[node.kind]
                label = f"{node.id}\\n{float(sqrt(node.length2)):.6f}"
            else:
                shape = "box" if node.type.on_boundary else "ellipse"
                label = f"{node.id}\\n{node.type.value} {_angle_label(node.weight)}"
            lines.append(f"    n{n} [label=\"{label}\", shape={shape}];")
        lines.append("  }")
    for link in diagram.links:
        a, b = link.ends
        if is_ed:
            label = f"{link.id} {float(sqrt(link.length2)):.6f}"
        else:
            label = f"{link.id} {_angle_label(link.angle)}"
        lines.append(f"  n{a} -- n{b} [label=\"{label}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"


_TYPE_COLOURS = {
    VertexType.CORNER: "#000000",
    VertexType.SIDE: "#555555",
    VertexType.PAIRED: "#1f77b4",
    VertexType.CONVEX: "#2ca02c",
    VertexType.REFLEX: "#d62728",
    VertexType.FLAT: "#ff7f0e",
}


def to_svg(vd: VertexMatchingDiagram, size: int = 360) -> str:
    """Both cut graphs side by side, vertices coloured by type and labelled by diagram component."""
    comp = vd.component_index()
    margin = 20
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{2 * size + 3 * margin}" height="{size + 2 * margin}">'
    ]
    for k, which in enumerate(TARGETS):
        g = vd.graphs[which]
        pts = [v.point.to_float() for v in g.vertices]
        xs, ys = [p[0] for p in pts], [p[1] for p in pts]
        span = max(max(xs) - min(xs), max(ys) - min(ys)) or 1.0
        ox = margin + k * (size + margin)

        def place(p, ox=ox, xs=xs, ys=ys, span=span):
            x = ox + (p[0] - min(xs)) / span * size
            y = margin + size - (p[1] - min(ys)) / span * size
            return f"{x:.3f}", f"{y:.3f}"

        parts.append(f'<g id="{which}">')
        for edge in g.edges:
            (x1, y1), (x2, y2) = place(pts[edge.u]), place(pts[edge.v])
            width = 2 if edge.kind == "boundary" else 1
            parts.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="#333" stroke-width="{width}"/>')
        for v, vert in enumerate(g.vertices):
            x, y = place(pts[v])
            n = vd.node_of_vertex[(which, v)]
            title = html.escape(f"{which}:v{v} {vert.type.value} component {comp[n]}")
            parts.append(
                f'<circle cx="{x}" cy="{y}" r="4" fill="{_TYPE_COLOURS[vert.type]}"><title>{title}</title></circle>'
            )
            parts.append(f'<text x="{x}" y="{y}" dx="5" dy="-5" font-size="9">{comp[n]}</text>')
        parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
