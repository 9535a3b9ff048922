"""Cut graphs: the planar graph formed by the cuts and the boundary of a target.

:func:`build_cut_graph` overlays the placed pieces of a verified tiling and
classifies every vertex:

``corner``  a corner of the target
``side``    a point on a side of the target
``paired``  an interior point where exactly two piece corners meet
``convex``  an interior point where three or more convex corners meet
``reflex``  an interior point where one of the meeting corners is reflex
``flat``    an interior point where a piece side passes straight through

A :class:`CombinatorialCutGraph` forgets the geometry and keeps only the
embedding (a rotation system with a distinguished outer boundary), the vertex
types and a tag for every interior angle (``convex``, ``reflex`` or an exact
multiple of pi/6).  Two cut graphs are equivalent when they agree after
smoothing away paired vertices, up to a symmetry of the target (rotations and
reflections).
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence, Union

from .dissection import Dissection, Polygon, classify_target
from .geom import Angle, Point, Segment, build_arrangement, direction_cmp, point_on_segment
from .kernel import sign

__all__ = [
    "VertexType",
    "CutVertex",
    "CutEdge",
    "CutGraph",
    "CombinatorialCutGraph",
    "DiffRange",
    "build_cut_graph",
    "theta_diff",
    "cc_diff",
    "tri_diff",
    "canonicalize",
    "canonical_code",
    "equivalent",
    "to_combinatorial",
    "TRI_WEIGHTS",
]


class VertexType(str, enum.Enum):
    CORNER = "corner"
    SIDE = "side"
    PAIRED = "paired"
    CONVEX = "convex"
    REFLEX = "reflex"
    FLAT = "flat"

    @property
    def on_boundary(self) -> bool:
        return self in (VertexType.CORNER, VertexType.SIDE)


_TYPE_CODE = {t: i for i, t in enumerate(VertexType)}

# interior angles measured in sixths of pi
FULL = 12
STRAIGHT = 6
AngleTag = Union[int, str]  # exact sixths, or "convex" / "reflex"


# ---------------------------------------------------------------------------
# geometric cut graphs
# ---------------------------------------------------------------------------

@dataclass
class CutVertex:
    point: Point
    type: VertexType
    corners: list[tuple[int, int]]  # (piece, corner index) gathered here
    through: list[tuple[int, int]]  # (piece, side index) passing straight through
    angles: list[Angle]  # gathered corners in order, then a straight angle per side passing through
    target_corner: int | None = None
    target_side: int | None = None


@dataclass
class CutEdge:
    u: int
    v: int
    kind: str  # boundary | internal
    sides: list[tuple[int, int]]  # (piece, side index) whose placed side contains the edge


@dataclass
class CutGraph:
    """Cut graph of one target of a verified dissection."""

    which: str
    target: Polygon
    target_kind: str | None
    vertices: list[CutVertex]
    edges: list[CutEdge]
    rotation: list[list[int]]  # per vertex: incident edge ids, counterclockwise
    faces: dict[int, list[int]]  # piece -> counterclockwise vertex cycle
    soft_flags: list[str] = field(default_factory=list)

    def degree(self, v: int) -> int:
        return len(self.rotation[v])

    def neighbours(self, v: int) -> list[int]:
        out = []
        for e in self.rotation[v]:
            edge = self.edges[e]
            out.append(edge.v if edge.u == v else edge.u)
        return out

    def vertex_at(self, p: Point) -> int:
        for i, vert in enumerate(self.vertices):
            if vert.point == p:
                return i
        raise KeyError(f"no cut-graph vertex at {p!r}")

    def edge_between(self, u: int, v: int) -> int | None:
        for e in self.rotation[u]:
            edge = self.edges[e]
            if {edge.u, edge.v} == {u, v}:
                return e
        return None

    def type_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for vert in self.vertices:
            counts[vert.type.value] = counts.get(vert.type.value, 0) + 1
        return dict(sorted(counts.items()))

    def boundary_cycle(self) -> list[int]:
        """Boundary vertices in counterclockwise order starting at target corner 0."""
        start = next(i for i, v in enumerate(self.vertices) if v.target_corner == 0)
        cycle = [start]
        prev = None
        cur = start
        while True:
            nxt = self._next_boundary(cur, prev)
            if nxt == start:
                return cycle
            cycle.append(nxt)
            prev, cur = cur, nxt

    def _next_boundary(self, cur: int, prev: int | None) -> int:
        # the counterclockwise successor along the target boundary
        verts = self.vertices
        side = self._outgoing_side(cur)
        best = None
        for w in self.neighbours(cur):
            e = self.edges[self.edge_between(cur, w)]
            if e.kind != "boundary":
                continue
            if point_on_segment(verts[w].point, side) and w != prev:
                if best is None or sign((verts[w].point - verts[cur].point).norm2() - (verts[best].point - verts[cur].point).norm2()) < 0:
                    best = w
        assert best is not None
        return best

    def _outgoing_side(self, v: int) -> Segment:
        vert = self.vertices[v]
        n = len(self.target.corners)
        if vert.target_corner is not None:
            j = vert.target_corner
        else:
            j = vert.target_side
        return Segment(self.target.corners[j], self.target.corners[(j + 1) % n])


def build_cut_graph(d: Dissection, which: str) -> CutGraph:
    """Overlay the placed pieces of target ``which`` and classify the vertices.

    The tiling is assumed to be verified (see :func:`verify_tiling`).
    """
    target = d.target(which)
    placed = d.placed(which)
    segments = list(target.sides)
    for poly in placed:
        segments.extend(poly.sides)
    arr = build_arrangement(segments)

    corner_at: dict[Point, list[tuple[int, int]]] = {}
    for i, poly in enumerate(placed):
        for j, p in enumerate(poly.corners):
            corner_at.setdefault(p, []).append((i, j))

    vertices: list[CutVertex] = []
    keep: list[int] = []
    for vi, p in enumerate(arr.vertices):
        gathered = corner_at.get(p, [])
        through = [
            (i, j)
            for i, poly in enumerate(placed)
            for j, s in enumerate(poly.sides)
            if (i, j) not in _sides_at(gathered, poly, i) and point_on_segment(p, s, closed=False)
        ]
        tcorner = next((j for j, c in enumerate(target.corners) if c == p), None)
        tside = None
        if tcorner is None:
            tside = next((j for j, s in enumerate(target.sides) if point_on_segment(p, s, closed=False)), None)
        if not gathered:
            # every surrounding angle is straight: not a vertex of the cut graph
            continue
        angles = [placed[i].angles[j].angle for i, j in gathered]
        angles += [Angle.of_pi(1)] * len(through)
        if tcorner is not None:
            vtype = VertexType.CORNER
        elif tside is not None:
            vtype = VertexType.SIDE
        elif through:
            vtype = VertexType.FLAT
        elif len(gathered) == 2:
            vtype = VertexType.PAIRED
        elif any(a.cmp(Angle.of_pi(1)) > 0 for a in angles):
            vtype = VertexType.REFLEX
        else:
            vtype = VertexType.CONVEX
        keep.append(vi)
        vertices.append(CutVertex(p, vtype, list(gathered), through, angles, tcorner, tside))

    index = {vi: k for k, vi in enumerate(keep)}
    # merge arrangement edges across suppressed straight-through points
    chains: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    adj = arr.rotation
    for a in keep:
        for b in adj[a]:
            if (a, b) in seen:
                continue
            path = [a, b]
            while path[-1] not in index:
                cur, prev = path[-1], path[-2]
                nxt = [w for w in adj[cur] if w != prev]
                path.append(nxt[0])
            seen.add((path[0], path[1]))
            seen.add((path[-1], path[-2]))
            chains.append((index[path[0]], index[path[-1]]))

    edges: list[CutEdge] = []
    for u, v in sorted({(min(a, b), max(a, b)) for a, b in chains}):
        pu, pv = vertices[u].point, vertices[v].point
        mid = Point((pu.x + pv.x) / 2, (pu.y + pv.y) / 2)
        kind = "boundary" if target.on_boundary(mid) else "internal"
        sides = [
            (i, j)
            for i, poly in enumerate(placed)
            for j, s in enumerate(poly.sides)
            if point_on_segment(pu, s) and point_on_segment(pv, s)
        ]
        edges.append(CutEdge(u, v, kind, sides))

    rotation: list[list[int]] = [[] for _ in vertices]
    for e, edge in enumerate(edges):
        rotation[edge.u].append(e)
        rotation[edge.v].append(e)
    for v, incident in enumerate(rotation):
        here = vertices[v].point

        def other(e: int, v: int = v) -> Point:
            edge = edges[e]
            return vertices[edge.v if edge.u == v else edge.u].point - here

        incident.sort(key=_cmp_key(lambda e1, e2: direction_cmp(other(e1), other(e2))))

    faces: dict[int, list[int]] = {}
    for i, poly in enumerate(placed):
        cycle: list[int] = []
        for s in poly.sides:
            on = [k for k, vert in enumerate(vertices) if point_on_segment(vert.point, s)]
            d_ = s.direction
            on.sort(key=_cmp_key(lambda a, b: sign(_dot(vertices[a].point - vertices[b].point, d_))))
            cycle.extend(on[:-1])
        faces[i] = cycle

    graph = CutGraph(which, target, classify_target(target), vertices, edges, rotation, faces)
    _orient_boundary_rotations(graph)
    graph.soft_flags = _soft_checks(graph, d.k)
    return graph


def _dot(u: Point, v: Point):
    return u.x * v.x + u.y * v.y


def _cmp_key(fn):
    import functools

    return functools.cmp_to_key(fn)


def _sides_at(gathered: list[tuple[int, int]], poly: Polygon, piece: int) -> set[tuple[int, int]]:
    """Sides of ``piece`` that end at one of its corners gathered here."""
    out = set()
    n = len(poly.corners)
    for i, j in gathered:
        if i == piece:
            out.add((i, j))
            out.add((i, (j - 1) % n))
    return out


def _orient_boundary_rotations(g: CutGraph) -> None:
    """Rotate boundary vertices' edge lists to start with the edge to the next boundary vertex."""
    cycle = g.boundary_cycle()
    for k, v in enumerate(cycle):
        nxt = cycle[(k + 1) % len(cycle)]
        e = g.edge_between(v, nxt)
        rot = g.rotation[v]
        i = rot.index(e)
        g.rotation[v] = rot[i:] + rot[:i]


def _soft_checks(g: CutGraph, k: int) -> list[str]:
    flags = []
    if k != 3:
        return flags
    for v, vert in enumerate(g.vertices):
        deg = g.degree(v)
        if deg == 1:
            flags.append(f"vertex {v} has degree 1")
        if vert.type.on_boundary and deg > 4:
            flags.append(f"boundary vertex {v} has degree {deg} > 4")
        if not vert.type.on_boundary and deg > 3:
            flags.append(f"internal vertex {v} has degree {deg} > 3")
    return flags


# ---------------------------------------------------------------------------
# combinatorial cut graphs
# ---------------------------------------------------------------------------

Dart = tuple[int, int]  # (edge id, endpoint index 0/1 at which the dart starts)


@dataclass
class CombinatorialCutGraph:
    """Geometry-free cut graph.

    ``rotation[v]`` lists the darts leaving ``v`` counterclockwise.  For a
    boundary vertex the list starts with the dart to the next boundary vertex
    (counterclockwise along ``boundary``) and ends with the dart to the
    previous one, so the outer wedge sits between the last and the first.
    ``angles[v]`` is the multiset of interior-angle tags at ``v``.
    ``markers`` lists edges that stand for a smoothed path of paired vertices.
    """

    target: str
    corner_sixths: int
    types: list[VertexType]
    edges: list[tuple[int, int, str]]
    rotation: list[list[Dart]]
    boundary: list[int]
    angles: list[list[AngleTag]]
    markers: list[int] = field(default_factory=list)
    label: str = ""
    family: str = ""

    # basic queries ------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.types)

    def degree(self, v: int) -> int:
        return len(self.rotation[v])

    def head(self, dart: Dart) -> int:
        e, end = dart
        return self.edges[e][1 - end]

    def tail(self, dart: Dart) -> int:
        e, end = dart
        return self.edges[e][end]

    @staticmethod
    def twin(dart: Dart) -> Dart:
        return (dart[0], 1 - dart[1])

    def neighbours(self, v: int) -> list[int]:
        return [self.head(d) for d in self.rotation[v]]

    def corners(self) -> list[int]:
        return [v for v in self.boundary if self.types[v] == VertexType.CORNER]

    def vertex_total(self, v: int) -> int:
        """Sum of interior angles at ``v`` in sixths of pi."""
        t = self.types[v]
        if t == VertexType.CORNER:
            return self.corner_sixths
        if t == VertexType.SIDE:
            return STRAIGHT
        return FULL

    def faces(self) -> list[list[int]]:
        """Bounded faces as vertex cycles (the outer face is omitted)."""
        pos = {}
        for v, rot in enumerate(self.rotation):
            for k, dart in enumerate(rot):
                pos[dart] = (v, k)
        seen: set[Dart] = set()
        outer_start = self.rotation[self.boundary[1]][-1] if len(self.boundary) > 1 else None
        faces = []
        for v, rot in enumerate(self.rotation):
            for dart in rot:
                if dart in seen:
                    continue
                cycle = []
                d = dart
                while d not in seen:
                    seen.add(d)
                    cycle.append(d)
                    w = self.head(d)
                    _, k = pos[self.twin(d)]
                    d = self.rotation[w][(k - 1) % len(self.rotation[w])]
                if outer_start is not None and outer_start in cycle:
                    continue
                faces.append([self.tail(x) for x in cycle])
        return faces

    # validation ------------------------------------------------------------------

    def validate(self) -> None:
        corner_count = sum(1 for t in self.types if t == VertexType.CORNER)
        expected = {"T": 3, "S": 4}.get(self.target)
        if expected is not None and corner_count != expected:
            raise ValueError(f"{self.label}: {corner_count} corners for target {self.target}")
        for v, rot in enumerate(self.rotation):
            for dart in rot:
                if self.tail(dart) != v:
                    raise ValueError(f"{self.label}: dart {dart} listed at vertex {v} starts elsewhere")
        nb = len(self.boundary)
        for k, v in enumerate(self.boundary):
            if not self.types[v].on_boundary:
                raise ValueError(f"{self.label}: boundary vertex {v} has type {self.types[v].value}")
            if self.head(self.rotation[v][0]) != self.boundary[(k + 1) % nb]:
                raise ValueError(f"{self.label}: rotation at {v} does not start toward the next boundary vertex")
            if self.head(self.rotation[v][-1]) != self.boundary[k - 1]:
                raise ValueError(f"{self.label}: rotation at {v} does not end toward the previous boundary vertex")
        for v in range(self.n):
            expect = self.degree(v) - (1 if self.types[v].on_boundary else 0)
            if len(self.angles[v]) != expect:
                raise ValueError(f"{self.label}: vertex {v} has {len(self.angles[v])} angle tags, expected {expect}")

    # serialization ------------------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        return {
            "schema": 1,
            "label": self.label,
            "family": self.family,
            "target": self.target,
            "corner_sixths": self.corner_sixths,
            "vertices": [
                {"type": t.value, "angles": list(a)} for t, a in zip(self.types, self.angles)
            ],
            "edges": [[u, v, k] for u, v, k in self.edges],
            "rotation": [[[e, end] for e, end in rot] for rot in self.rotation],
            "boundary": list(self.boundary),
            "markers": list(self.markers),
        }

    @staticmethod
    def from_json(doc: dict[str, Any]) -> "CombinatorialCutGraph":
        if doc.get("schema") != 1:
            raise ValueError(f"unsupported schema {doc.get('schema')!r}")
        g = CombinatorialCutGraph(
            target=doc["target"],
            corner_sixths=int(doc["corner_sixths"]),
            types=[VertexType(v["type"]) for v in doc["vertices"]],
            edges=[(int(u), int(v), str(k)) for u, v, k in doc["edges"]],
            rotation=[[(int(e), int(end)) for e, end in rot] for rot in doc["rotation"]],
            boundary=[int(v) for v in doc["boundary"]],
            angles=[list(v["angles"]) for v in doc["vertices"]],
            markers=[int(e) for e in doc.get("markers", [])],
            label=doc.get("label", ""),
            family=doc.get("family", ""),
        )
        g.validate()
        return g

    @staticmethod
    def load(path: str | Path) -> "CombinatorialCutGraph":
        return CombinatorialCutGraph.from_json(json.loads(Path(path).read_text()))


def default_angle_tags(vtype: VertexType, degree: int, corner_sixths: int) -> list[AngleTag]:
    """Angle tags implied by a vertex type when nothing more is known."""
    if vtype == VertexType.CORNER:
        return [corner_sixths] if degree == 2 else ["convex"] * (degree - 1)
    if vtype == VertexType.SIDE:
        return ["convex"] * (degree - 1)
    if vtype == VertexType.PAIRED:
        return ["convex", "reflex"]
    if vtype == VertexType.CONVEX:
        return ["convex"] * degree
    if vtype == VertexType.REFLEX:
        return ["reflex"] + ["convex"] * (degree - 1)
    return [STRAIGHT] + ["convex"] * (degree - 1)


def _angle_tag(a: Angle) -> AngleTag:
    k = a.sixths()
    if k is not None:
        return k
    return "convex" if a.cmp(Angle.of_pi(1)) < 0 else "reflex"


def to_combinatorial(g: CutGraph) -> CombinatorialCutGraph:
    """Forget the geometry of a cut graph, keeping embedding, types and angle tags."""
    kind = g.target_kind or f"{len(g.target.corners)}-gon"
    corner = g.target.angles[0].angle.sixths()
    edges = [(e.u, e.v, e.kind) for e in g.edges]
    rotation = []
    for v, rot in enumerate(g.rotation):
        rotation.append([(e, 0 if g.edges[e].u == v else 1) for e in rot])
    angles = []
    for vert in g.vertices:
        tags = [_angle_tag(a) for a in vert.angles]
        angles.append(_sorted_tags(tags))
    return CombinatorialCutGraph(
        target=kind,
        corner_sixths=corner if corner is not None else -1,
        types=[v.type for v in g.vertices],
        edges=edges,
        rotation=rotation,
        boundary=g.boundary_cycle(),
        angles=angles,
        label=f"{g.which}",
    )


def _sorted_tags(tags: Iterable[AngleTag]) -> list[AngleTag]:
    return sorted(tags, key=lambda t: (0, t, "") if isinstance(t, int) else (1, 0, t))


# ---------------------------------------------------------------------------
# angle-count invariants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiffRange:
    """Interval of possible values of an angle-count invariant.

    Geometric cut graphs always give an exact value; combinatorial graphs give
    bounds when some angles are only known to be convex or reflex.
    """

    lo: int
    hi: int

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def value(self) -> int | None:
        """The value when it is pinned down, otherwise ``None`` (unknown)."""
        return self.lo if self.exact else None

    def __add__(self, other: "DiffRange") -> "DiffRange":
        return DiffRange(self.lo + other.lo, self.hi + other.hi)

    def __str__(self) -> str:
        return str(self.lo) if self.exact else f"[{self.lo}, {self.hi}]"


TRI_WEIGHTS = {2: 1, 4: -1, 8: 1, 10: -1}


def _theta_weights(theta: Fraction) -> dict[int, int]:
    t = Fraction(theta) * 6
    if t.denominator != 1 or not 0 < t < STRAIGHT:
        raise ValueError("theta must be a multiple of pi/6 strictly between 0 and pi")
    k = int(t)
    return {k: 1, FULL - k: -1}


def _vertex_range(tags: Sequence[AngleTag], total: int, weights: dict[int, int], pin_reflex: bool) -> DiffRange:
    fixed = 0
    fixed_weight = 0
    unknown: list[str] = []
    for t in tags:
        if isinstance(t, int):
            fixed += t
            fixed_weight += weights.get(t, 0)
        else:
            unknown.append(t)
    if not unknown:
        return DiffRange(fixed_weight, fixed_weight)

    def weighted_values(tag: str) -> list[int]:
        if tag == "convex":
            return [k for k in weights if 0 < k < STRAIGHT]
        return [k for k in weights if STRAIGHT < k < FULL]

    def candidates(tag: str) -> list[int]:
        if tag == "reflex" and not pin_reflex:
            return []
        return weighted_values(tag)

    options = [[None] + candidates(t) for t in unknown]
    lo = hi = None
    for choice in itertools.product(*options):
        s = fixed
        wsum = fixed_weight
        free_convex = free_reflex = 0
        free_tags = []
        for tag, c in zip(unknown, choice):
            if c is None:
                free_tags.append(tag)
                if tag == "convex":
                    free_convex += 1
                else:
                    free_reflex += 1
            else:
                s += c
                wsum += weights[c]
        rest = total - s
        if not free_tags:
            feasible = rest == 0
        else:
            low = STRAIGHT * free_reflex
            high = STRAIGHT * free_convex + FULL * free_reflex
            feasible = low < rest < high
            if feasible and len(free_tags) == 1 and rest in weighted_values(free_tags[0]):
                feasible = False
        if feasible:
            lo = wsum if lo is None else min(lo, wsum)
            hi = wsum if hi is None else max(hi, wsum)
    if lo is None:
        raise ValueError(f"inconsistent angle tags {list(tags)} for total {total}")
    return DiffRange(lo, hi)


def _weighted(g: Union[CutGraph, CombinatorialCutGraph], weights: dict[int, int], pin_reflex: bool) -> DiffRange:
    if isinstance(g, CutGraph):
        total = 0
        for vert in g.vertices:
            for a in vert.angles:
                k = a.sixths()
                if k is not None:
                    total += weights.get(k, 0)
        return DiffRange(total, total)
    out = DiffRange(0, 0)
    for v in range(g.n):
        out = out + _vertex_range(g.angles[v], g.vertex_total(v), weights, pin_reflex)
    return out


def theta_diff(g: Union[CutGraph, CombinatorialCutGraph], theta: Fraction, *, pin_reflex: bool = False) -> DiffRange:
    """Occurrences of interior angle ``theta`` minus occurrences of ``2 pi - theta``.

    ``theta`` is given as a fraction of pi (a multiple of 1/6 below 1).  For
    combinatorial graphs, angles tagged only ``convex`` may equal ``theta``
    if the vertex's angle sum allows it.  A ``reflex`` tag is treated as a
    generic reflex angle unless ``pin_reflex`` is set, in which case it may
    also equal ``2 pi - theta``.
    """
    return _weighted(g, _theta_weights(theta), pin_reflex)


def tri_diff(g: Union[CutGraph, CombinatorialCutGraph], *, pin_reflex: bool = False) -> DiffRange:
    """``theta_diff(pi/3) - theta_diff(2 pi/3)`` (see :func:`theta_diff` for ``pin_reflex``)."""
    return _weighted(g, TRI_WEIGHTS, pin_reflex)


def cc_diff(g: Union[CutGraph, CombinatorialCutGraph]) -> int:
    """Number of convex interior angles minus number of reflex ones."""
    total = 0
    if isinstance(g, CutGraph):
        for vert in g.vertices:
            for a in vert.angles:
                total += -a.cmp(Angle.of_pi(1))
        return total
    for tags in g.angles:
        for t in tags:
            if isinstance(t, int):
                total += (t < STRAIGHT) - (t > STRAIGHT)
            else:
                total += 1 if t == "convex" else -1
    return total


# ---------------------------------------------------------------------------
# smoothing and canonical labeling
# ---------------------------------------------------------------------------

def smooth(g: CombinatorialCutGraph) -> CombinatorialCutGraph:
    """Replace every maximal path of paired vertices by a single marked edge."""
    types = list(g.types)
    edges = [list(e) for e in g.edges]
    rotation = [list(r) for r in g.rotation]
    alive_e = [True] * len(edges)
    alive_v = [True] * g.n
    marked = set(g.markers)
    for v in range(g.n):
        if types[v] != VertexType.PAIRED or len(rotation[v]) != 2:
            continue
        (e1, end1), (e2, end2) = rotation[v]
        if e1 == e2:
            continue  # an isolated loop; leave it
        a = edges[e1][1 - end1]
        b_end = 1 - end2
        b = edges[e2][b_end]
        # reuse e1 as the merged edge from a to b
        a_end = 1 - end1
        new = [0, 0, edges[e1][2]]
        new[a_end] = a
        new[1 - a_end] = b
        edges[e1] = new
        rotation[b] = [(e1, 1 - a_end) if (x == e2 and y == b_end) else (x, y) for x, y in rotation[b]]
        alive_e[e2] = False
        alive_v[v] = False
        marked.add(e1)
        marked.discard(e2)
        rotation[v] = []
    vmap = {v: i for i, v in enumerate(v for v in range(g.n) if alive_v[v])}
    emap = {e: i for i, e in enumerate(e for e in range(len(edges)) if alive_e[e])}
    return CombinatorialCutGraph(
        target=g.target,
        corner_sixths=g.corner_sixths,
        types=[types[v] for v in vmap],
        edges=[(vmap[edges[e][0]], vmap[edges[e][1]], edges[e][2]) for e in emap],
        rotation=[[(emap[e], end) for e, end in rotation[v]] for v in vmap],
        boundary=[vmap[v] for v in g.boundary],
        angles=[list(g.angles[v]) for v in vmap],
        markers=sorted(emap[e] for e in marked if alive_e[e]),
        label=g.label,
        family=g.family,
    )


def _traverse(g: CombinatorialCutGraph, start: Dart, orient: int) -> tuple[tuple[int, ...], list[int], list[Dart]]:
    rot = g.rotation if orient > 0 else [list(reversed(r)) for r in g.rotation]
    pos = {}
    for v, r in enumerate(rot):
        for k, dart in enumerate(r):
            pos[dart] = k
    v0 = g.tail(start)
    order = {v0: 0}
    first = {v0: start}
    queue = [v0]
    code: list[int] = []
    i = 0
    while i < len(queue):
        v = queue[i]
        i += 1
        r = rot[v]
        k0 = pos[first[v]]
        code.append(_TYPE_CODE[g.types[v]])
        code.append(len(r))
        for j in range(len(r)):
            dart = r[(k0 + j) % len(r)]
            w = g.head(dart)
            tw = g.twin(dart)
            if w not in order:
                order[w] = len(order)
                first[w] = tw
                queue.append(w)
            code.append(order[w])
            code.append((pos[tw] - pos[first[w]]) % len(rot[w]))
            code.append(1 if g.edges[dart[0]][2] == "boundary" else 0)
    if len(order) != g.n:
        raise ValueError(f"{g.label}: cut graph is not connected")
    return tuple(code), queue, [first[v] for v in queue]


def _starts(g: CombinatorialCutGraph) -> list[tuple[Dart, int]]:
    out = []
    for v in g.corners():
        out.append((g.rotation[v][0], 1))
        out.append((g.rotation[v][-1], -1))
    return out


def canonical_code(g: Union[CutGraph, CombinatorialCutGraph]) -> tuple:
    """A tuple that is equal for two graphs exactly when they are equivalent."""
    comb = g if isinstance(g, CombinatorialCutGraph) else to_combinatorial(g)
    s = smooth(comb)
    best = min(_traverse(s, d, o)[0] for d, o in _starts(s))
    return (s.target, s.corner_sixths, len(s.corners())) + best


def canonicalize(g: Union[CutGraph, CombinatorialCutGraph]) -> CombinatorialCutGraph:
    """Smoothed graph relabeled in canonical vertex order."""
    comb = g if isinstance(g, CombinatorialCutGraph) else to_combinatorial(g)
    s = smooth(comb)
    best = None
    for d, o in _starts(s):
        code, order, _ = _traverse(s, d, o)
        if best is None or code < best[0]:
            best = (code, order, o)
    _, order, orient = best
    new_index = {v: i for i, v in enumerate(order)}
    # edges are renumbered in order of first appearance in the relabeled rotations
    rot = s.rotation if orient > 0 else [list(reversed(r)) for r in s.rotation]
    edge_order: dict[int, int] = {}
    for v in order:
        for e, _ in rot[v]:
            edge_order.setdefault(e, len(edge_order))
    edges: list[tuple[int, int, str]] = [None] * len(s.edges)  # type: ignore[list-item]
    flip: dict[int, bool] = {}
    for e, ne in edge_order.items():
        u, v, kind = s.edges[e]
        a, b = new_index[u], new_index[v]
        flip[e] = a > b
        edges[ne] = (min(a, b), max(a, b), kind)

    def dart(d: Dart) -> Dart:
        e, end = d
        return (edge_order[e], (1 - end) if flip[e] else end)

    rotation = [[] for _ in order]
    for v in order:
        rotation[new_index[v]] = [dart(d) for d in rot[v]]
    if orient > 0:
        boundary = [new_index[v] for v in s.boundary]
    else:
        boundary = [new_index[v] for v in reversed(s.boundary)]
    nb = len(boundary)
    out = CombinatorialCutGraph(
        target=s.target,
        corner_sixths=s.corner_sixths,
        types=[s.types[v] for v in order],
        edges=edges,
        rotation=rotation,
        boundary=boundary,
        angles=[list(s.angles[v]) for v in order],
        markers=sorted(edge_order[e] for e in s.markers),
        label=s.label,
        family=s.family,
    )
    for k, v in enumerate(boundary):
        nxt = boundary[(k + 1) % nb]
        r = out.rotation[v]
        i = next(j for j, d in enumerate(r) if out.head(d) == nxt and out.edges[d[0]][2] == "boundary")
        out.rotation[v] = r[i:] + r[:i]  # start toward the next boundary vertex again
    c0 = next(v for v in boundary if out.types[v] == VertexType.CORNER)
    i = boundary.index(c0)
    out.boundary = boundary[i:] + boundary[:i]
    return out


def equivalent(g1: Union[CutGraph, CombinatorialCutGraph], g2: Union[CutGraph, CombinatorialCutGraph]) -> bool:
    """Equal after smoothing paired vertices, up to target symmetry (including reflections)."""
    return canonical_code(g1) == canonical_code(g2)


def subdivide(g: CombinatorialCutGraph, edge: int, tags: Sequence[AngleTag] = ("convex", "reflex")) -> CombinatorialCutGraph:
    """Insert a paired vertex in the middle of internal edge ``edge``."""
    u, v, kind = g.edges[edge]
    if kind != "internal":
        raise ValueError("only internal edges can be subdivided")
    p = g.n
    edges = list(g.edges)
    new_e = len(edges)
    edges[edge] = (u, p, kind)
    edges.append((p, v, kind))
    rotation = [list(r) for r in g.rotation]
    rotation[v] = [(new_e, 1) if d == (edge, 1) else d for d in rotation[v]]
    if u == v:
        raise ValueError("loops cannot be subdivided")
    rotation.append([(edge, 1), (new_e, 0)])
    return CombinatorialCutGraph(
        target=g.target,
        corner_sixths=g.corner_sixths,
        types=list(g.types) + [VertexType.PAIRED],
        edges=edges,
        rotation=rotation,
        boundary=list(g.boundary),
        angles=[list(a) for a in g.angles] + [_sorted_tags(tags)],
        markers=list(g.markers),
        label=g.label,
        family=g.family,
    )
