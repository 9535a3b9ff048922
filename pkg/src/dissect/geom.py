"""Exact planar geometry on constructible coordinates.

Everything here is a predicate or a construction over :class:`Scalar`
coordinates; no floating point value ever decides anything.  Angles are never
turned into radians.  An angle is stored as a direction vector (whose
argument is the angle modulo a full turn) plus a count of whole turns, which
is enough to add, compare and recognise angles such as a third of a turn.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Sequence

from .kernel import Scalar, as_scalar, sign, sqrt

__all__ = [
    "Point",
    "Vector",
    "Orientation",
    "orientation",
    "cross",
    "dot",
    "Segment",
    "Intersection",
    "intersect",
    "point_on_segment",
    "Angle",
    "CornerAngle",
    "angle_cmp",
    "angle_is",
    "corner_angle",
    "Arrangement",
    "build_arrangement",
    "point_cmp",
]


@dataclass(frozen=True)
class Point:
    """A point (or vector) with exact coordinates."""

    x: Scalar
    y: Scalar

    def __init__(self, x, y):
        object.__setattr__(self, "x", as_scalar(x))
        object.__setattr__(self, "y", as_scalar(y))

    def __add__(self, other: "Point") -> "Point":
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point") -> "Point":
        return Point(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "Point":
        return Point(-self.x, -self.y)

    def scale(self, k) -> "Point":
        return Point(self.x * k, self.y * k)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Point):
            return NotImplemented
        return sign(self.x - other.x) == 0 and sign(self.y - other.y) == 0

    def __hash__(self) -> int:
        return hash((self.x, self.y))

    def is_zero(self) -> bool:
        return sign(self.x) == 0 and sign(self.y) == 0

    def norm2(self) -> Scalar:
        return self.x * self.x + self.y * self.y

    def to_float(self) -> tuple[float, float]:
        return (float(self.x), float(self.y))

    def __repr__(self) -> str:
        return f"Point({self.x.to_text()!r}, {self.y.to_text()!r})"


Vector = Point


def cross(u: Point, v: Point) -> Scalar:
    return u.x * v.y - u.y * v.x


def dot(u: Point, v: Point) -> Scalar:
    return u.x * v.x + u.y * v.y


def point_cmp(p: Point, q: Point) -> int:
    """Lexicographic (x, then y) exact comparison."""
    s = sign(p.x - q.x)
    if s:
        return s
    return sign(p.y - q.y)


class Orientation(enum.IntEnum):
    CW = -1
    COLLINEAR = 0
    CCW = 1


def orientation(p: Point, q: Point, r: Point) -> Orientation:
    """Sign of ``(q - p) x (r - p)``."""
    return Orientation(sign(cross(q - p, r - p)))


# ---------------------------------------------------------------------------
# segments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise ValueError("degenerate segment: endpoints coincide")

    @property
    def direction(self) -> Point:
        return self.b - self.a

    def length2(self) -> Scalar:
        return self.direction.norm2()

    def reversed(self) -> "Segment":
        return Segment(self.b, self.a)


def point_on_segment(p: Point, s: Segment, *, closed: bool = True) -> bool:
    """Whether ``p`` lies on ``s`` (endpoints included when ``closed``)."""
    if orientation(s.a, s.b, p) != Orientation.COLLINEAR:
        return False
    d = s.direction
    t = dot(p - s.a, d)
    ts = sign(t)
    te = sign(t - d.norm2())
    if closed:
        return ts >= 0 and te <= 0
    return ts > 0 and te < 0


@dataclass(frozen=True)
class Intersection:
    """Result of :func:`intersect`: ``kind`` is ``empty``, ``point`` or ``overlap``."""

    kind: str
    point: Point | None = None
    segment: Segment | None = None


_EMPTY = Intersection("empty")


def intersect(s1: Segment, s2: Segment) -> Intersection:
    """Exact intersection of two closed segments."""
    o1 = orientation(s1.a, s1.b, s2.a)
    o2 = orientation(s1.a, s1.b, s2.b)
    if o1 == 0 and o2 == 0:
        return _collinear_intersection(s1, s2)
    o3 = orientation(s2.a, s2.b, s1.a)
    o4 = orientation(s2.a, s2.b, s1.b)
    if o1 * o2 > 0 or o3 * o4 > 0:
        return _EMPTY
    if o1 == 0:
        return Intersection("point", s2.a)
    if o2 == 0:
        return Intersection("point", s2.b)
    if o3 == 0:
        return Intersection("point", s1.a)
    if o4 == 0:
        return Intersection("point", s1.b)
    d1, d2 = s1.direction, s2.direction
    t = cross(s2.a - s1.a, d2) / cross(d1, d2)
    return Intersection("point", s1.a + d1.scale(t))


def _collinear_intersection(s1: Segment, s2: Segment) -> Intersection:
    d = s1.direction
    key = lambda p: dot(p - s1.a, d)  # noqa: E731 - parameter along s1
    pts1 = sorted([s1.a, s1.b], key=cmp_to_key(lambda p, q: sign(key(p) - key(q))))
    pts2 = sorted([s2.a, s2.b], key=cmp_to_key(lambda p, q: sign(key(p) - key(q))))
    lo = pts1[0] if sign(key(pts1[0]) - key(pts2[0])) >= 0 else pts2[0]
    hi = pts1[1] if sign(key(pts1[1]) - key(pts2[1])) <= 0 else pts2[1]
    c = sign(key(hi) - key(lo))
    if c < 0:
        return _EMPTY
    if c == 0:
        return Intersection("point", lo)
    return Intersection("overlap", segment=Segment(lo, hi))


# ---------------------------------------------------------------------------
# angles
# ---------------------------------------------------------------------------

def _half(v: Point) -> int:
    """0 for directions with argument in [0, pi), 1 for [pi, 2pi)."""
    sy = sign(v.y)
    if sy > 0 or (sy == 0 and sign(v.x) > 0):
        return 0
    return 1


def direction_cmp(u: Point, v: Point) -> int:
    """Compare the arguments of two nonzero vectors in [0, 2pi)."""
    hu, hv = _half(u), _half(v)
    if hu != hv:
        return -1 if hu < hv else 1
    return -sign(cross(u, v))


def _cmul(u: Point, v: Point) -> Point:
    return Point(u.x * v.x - u.y * v.y, u.x * v.y + u.y * v.x)


def _conj(u: Point) -> Point:
    return Point(u.x, -u.y)


_SQRT3 = sqrt(3)


def _unit_direction(sixths: int) -> Point | None:
    """A vector pointing at angle ``sixths * pi / 6``."""
    table = {
        0: (1, 0), 1: (_SQRT3, 1), 2: (1, _SQRT3), 3: (0, 1), 4: (-1, _SQRT3),
        5: (-_SQRT3, 1), 6: (-1, 0), 7: (-_SQRT3, -1), 8: (-1, -_SQRT3),
        9: (0, -1), 10: (1, -_SQRT3), 11: (_SQRT3, -1),
    }
    x, y = table[sixths % 12]
    return Point(x, y)


def _eighths_direction(eighths: int) -> Point:
    table = {0: (1, 0), 1: (1, 1), 2: (0, 1), 3: (-1, 1), 4: (-1, 0), 5: (-1, -1), 6: (0, -1), 7: (1, -1)}
    x, y = table[eighths % 8]
    return Point(x, y)


@dataclass(frozen=True)
class Angle:
    """A nonnegative angle: ``turns`` full turns plus the argument of ``direction``.

    ``direction`` need not be a unit vector; only its argument matters.  The
    zero angle is ``Angle(0, (1, 0))``.
    """

    turns: int
    direction: Point

    @staticmethod
    def zero() -> "Angle":
        return Angle(0, Point(1, 0))

    @staticmethod
    def between(u: Point, v: Point) -> "Angle":
        """Counterclockwise angle from ``u`` to ``v`` in [0, 2pi)."""
        return Angle(0, _cmul(v, _conj(u)))

    @staticmethod
    def of_pi(fraction: Fraction | int) -> "Angle":
        """The angle ``fraction * pi`` for fractions with denominator 1, 2, 3, 4 or 6."""
        q = Fraction(fraction)
        if q < 0:
            raise ValueError("angles are nonnegative")
        turns = int(q // 2)
        rest = q - 2 * turns
        if (rest * 6).denominator == 1:
            return Angle(turns, _unit_direction(int(rest * 6)))
        if (rest * 4).denominator == 1:
            return Angle(turns, _eighths_direction(int(rest * 4)))
        raise ValueError(f"no exact direction for {q}*pi")

    def __add__(self, other: "Angle") -> "Angle":
        d = _cmul(self.direction, other.direction)
        # the sum wraps past a full turn exactly when its argument drops below ours
        wrap = 0
        if not _is_zero_direction(other.direction) and direction_cmp(d, self.direction) < 0:
            wrap = 1
        return Angle(self.turns + other.turns + wrap, d)

    def cmp(self, other: "Angle") -> int:
        if self.turns != other.turns:
            return -1 if self.turns < other.turns else 1
        return direction_cmp(self.direction, other.direction)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Angle):
            return NotImplemented
        return self.cmp(other) == 0

    def __lt__(self, other: "Angle") -> bool:
        return self.cmp(other) < 0

    def __le__(self, other: "Angle") -> bool:
        return self.cmp(other) <= 0

    def __hash__(self) -> int:
        return hash(self.turns)

    def is_pi_multiple(self, fraction: Fraction | int) -> bool:
        return self == Angle.of_pi(fraction)

    def sixths(self) -> int | None:
        """``k`` if the angle equals ``k * pi / 6`` exactly, else ``None``."""
        for k in range(12):
            if self == Angle.of_pi(Fraction(k, 6) + 2 * self.turns):
                return k + 12 * self.turns
        return None

    def to_float(self) -> float:
        import math

        x, y = self.direction.to_float()
        a = math.atan2(y, x)
        if a < 0:
            a += 2 * math.pi
        return 2 * math.pi * self.turns + a


def _is_zero_direction(d: Point) -> bool:
    return sign(d.y) == 0 and sign(d.x) > 0


@dataclass(frozen=True)
class CornerAngle:
    """Interior angle at a polygon corner traversed counterclockwise.

    ``incoming`` is the direction arriving at the corner and ``outgoing`` the
    direction leaving it; the interior lies to the left of the traversal.
    """

    incoming: Point
    outgoing: Point

    def __post_init__(self) -> None:
        if self.incoming.is_zero() or self.outgoing.is_zero():
            raise ValueError("corner directions must be nonzero")

    @property
    def angle(self) -> Angle:
        # counterclockwise sweep from the outgoing side to the reversed incoming side
        return Angle.between(self.outgoing, -self.incoming)

    def classify(self) -> str:
        """``convex`` (< pi), ``straight`` (= pi) or ``reflex`` (> pi)."""
        c = self.angle.cmp(Angle.of_pi(1))
        return {-1: "convex", 0: "straight", 1: "reflex"}[c]


def corner_angle(prev: Point, here: Point, nxt: Point) -> CornerAngle:
    return CornerAngle(here - prev, nxt - here)


def angle_cmp(u: CornerAngle | Angle, v: CornerAngle | Angle) -> int:
    """Exact comparison of two angles: -1, 0 or +1."""
    a = u.angle if isinstance(u, CornerAngle) else u
    b = v.angle if isinstance(v, CornerAngle) else v
    return a.cmp(b)


def angle_is(u: CornerAngle | Angle, fraction_of_pi: Fraction | int) -> bool:
    """Whether the angle equals ``fraction_of_pi * pi`` exactly."""
    a = u.angle if isinstance(u, CornerAngle) else u
    return a == Angle.of_pi(fraction_of_pi)


# ---------------------------------------------------------------------------
# segment arrangements
# ---------------------------------------------------------------------------

@dataclass
class Arrangement:
    """Planar subdivision induced by a set of segments.

    ``faces`` lists the bounded faces as counterclockwise vertex cycles
    (``face_edges`` gives the same cycles as half-edges).  ``holes`` lists
    the clockwise cycles, one per connected component, that bound the
    components from outside.  ``sample_points`` holds one exact point strictly
    inside every bounded face.
    """

    vertices: list[Point] = field(default_factory=list)
    edges: list[tuple[int, int]] = field(default_factory=list)
    faces: list[list[int]] = field(default_factory=list)
    face_edges: list[list[tuple[int, int]]] = field(default_factory=list)
    holes: list[list[int]] = field(default_factory=list)
    sample_points: list[Point] = field(default_factory=list)
    face_labels: list[frozenset[int]] = field(default_factory=list)
    rotation: list[list[int]] = field(default_factory=list)

    @property
    def face_count(self) -> int:
        """Number of faces including the unbounded one."""
        return len(self.faces) + 1

    def component_count(self) -> int:
        parent = list(range(len(self.vertices)))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for u, v in self.edges:
            parent[find(u)] = find(v)
        return len({find(i) for i in range(len(self.vertices))})

    def euler_ok(self) -> bool:
        """``V - E + F = 1 + C``; for a connected arrangement this is ``V - E + F = 2``."""
        v, e, f = len(self.vertices), len(self.edges), self.face_count
        return v - e + f == 1 + self.component_count()

    def vertex_index(self, p: Point) -> int | None:
        for i, q in enumerate(self.vertices):
            if q == p:
                return i
        return None


def build_arrangement(segments: Sequence[Segment]) -> Arrangement:
    """Materialize every intersection and trace the faces of the union."""
    segments = list(segments)
    arr = Arrangement()
    if not segments:
        return arr
    points: list[Point] = []
    for s in segments:
        points.extend([s.a, s.b])
    for i in range(len(segments)):
        for j in range(i + 1, len(segments)):
            hit = intersect(segments[i], segments[j])
            if hit.kind == "point":
                points.append(hit.point)
            elif hit.kind == "overlap":
                points.extend([hit.segment.a, hit.segment.b])
    ordered = sorted(points, key=cmp_to_key(point_cmp))
    verts: list[Point] = []
    for p in ordered:
        if not verts or point_cmp(verts[-1], p) != 0:
            verts.append(p)
    arr.vertices = verts

    edge_set: set[tuple[int, int]] = set()
    for s in segments:
        on = [i for i, p in enumerate(verts) if point_on_segment(p, s)]
        d = s.direction
        on.sort(key=cmp_to_key(lambda i, j: sign(dot(verts[i] - verts[j], d))))
        for u, v in zip(on, on[1:]):
            edge_set.add((min(u, v), max(u, v)))
    arr.edges = sorted(edge_set)

    adjacency: list[list[int]] = [[] for _ in verts]
    for u, v in arr.edges:
        adjacency[u].append(v)
        adjacency[v].append(u)
    for u, nbrs in enumerate(adjacency):
        nbrs.sort(key=cmp_to_key(lambda a, b: direction_cmp(verts[a] - verts[u], verts[b] - verts[u])))
    arr.rotation = adjacency

    position = {(u, v): k for u, nbrs in enumerate(adjacency) for k, v in enumerate(nbrs)}
    visited: set[tuple[int, int]] = set()
    for u, nbrs in enumerate(adjacency):
        for v in nbrs:
            if (u, v) in visited:
                continue
            cycle: list[tuple[int, int]] = []
            a, b = u, v
            while (a, b) not in visited:
                visited.add((a, b))
                cycle.append((a, b))
                around = adjacency[b]
                k = position[(b, a)]
                a, b = b, around[(k - 1) % len(around)]
            area2 = sum((cross(verts[p], verts[q]) for p, q in cycle), start=Scalar(0))
            if sign(area2) > 0:
                arr.face_edges.append(cycle)
                arr.faces.append([p for p, _ in cycle])
            else:
                arr.holes.append([p for p, _ in cycle])
    arr.sample_points = [_face_sample(arr, cycle) for cycle in arr.face_edges]
    return arr


def _face_sample(arr: Arrangement, cycle: list[tuple[int, int]]) -> Point:
    """An exact point strictly inside the face bounded (on the left) by ``cycle``.

    At the lexicographically smallest vertex of the cycle the face occupies a
    convex wedge; a small enough triangle inside that wedge avoids every other
    edge, and its centroid is inside the face.
    """
    verts = arr.vertices
    k = min(range(len(cycle)), key=cmp_to_key(lambda i, j: point_cmp(verts[cycle[i][0]], verts[cycle[j][0]])))
    here = cycle[k][0]
    nxt = cycle[k][1]
    prev = cycle[k - 1][0]
    v = verts[here]
    a = verts[nxt] - v
    b = verts[prev] - v
    t = Fraction(1, 2)
    while True:
        p1 = v + a.scale(t)
        p2 = v + b.scale(t)
        if _triangle_is_clear(arr, here, (v, p1, p2)):
            third = Fraction(1, 3)
            return Point((v.x + p1.x + p2.x) * third, (v.y + p1.y + p2.y) * third)
        t /= 4


def _triangle_is_clear(arr: Arrangement, apex: int, tri: tuple[Point, Point, Point]) -> bool:
    verts = arr.vertices
    sides = [Segment(tri[0], tri[1]), Segment(tri[1], tri[2]), Segment(tri[2], tri[0])]
    for u, w in arr.edges:
        if apex in (u, w):
            continue
        seg = Segment(verts[u], verts[w])
        if _point_in_triangle(seg.a, tri) or _point_in_triangle(seg.b, tri):
            return False
        if any(intersect(seg, side).kind != "empty" for side in sides):
            return False
    return True


def _point_in_triangle(p: Point, tri: tuple[Point, Point, Point]) -> bool:
    o = [orientation(tri[i], tri[(i + 1) % 3], p) for i in range(3)]
    return all(x >= 0 for x in o) or all(x <= 0 for x in o)


def polygon_area2(corners: Iterable[Point]) -> Scalar:
    """Twice the signed shoelace area."""
    pts = list(corners)
    total = Scalar(0)
    for i, p in enumerate(pts):
        total = total + cross(p, pts[(i + 1) % len(pts)])
    return total
