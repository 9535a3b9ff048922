"""Dissections: pieces, rigid placements, tiling verification and corner checks.

A dissection lists ``k`` pieces (simple counterclockwise polygons in their
own coordinates) and two lists of placements, one per target polygon.  A
placement is a rotation ``(c, s)`` with ``c**2 + s**2 == 1`` followed by a
translation; reflections cannot be expressed and are rejected when a JSON
file asks for one.

The two targets are called ``P`` and ``Pprime`` throughout.
"""

from __future__ import annotations

import json
from fractions import Fraction
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from .geom import (
    Arrangement,
    CornerAngle,
    Orientation,
    Point,
    Segment,
    angle_is,
    build_arrangement,
    corner_angle,
    intersect,
    orientation,
    point_on_segment,
    polygon_area2,
)
from .kernel import Scalar, ScalarError, parse_scalar, sign, sqrt

__all__ = [
    "PolygonError",
    "PlacementError",
    "SchemaError",
    "Polygon",
    "Placement",
    "Dissection",
    "Violation",
    "TilingReport",
    "Finding",
    "area",
    "congruent",
    "verify_tiling",
    "check_corner_lemmas",
    "classify_target",
    "triangle_T",
    "square_S",
    "load_dissection",
    "dump_dissection",
    "TARGETS",
    "identity_dissection",
]

TARGETS = ("P", "Pprime")
SCHEMA_VERSION = 1

REF_SIMPLE = "Lemma geom-simple"
REF_T_VERTEX = "Lemma geom-T-vertex"
REF_S_VERTEX = "Lemma geom-S-vertex"
REF_UNION = "Definition dissection"


class PolygonError(ValueError):
    """A polygon violates the simple, counterclockwise, non-degenerate contract."""

    def __init__(self, message: str, ref: str | None = None):
        self.ref = ref
        super().__init__(message if ref is None else f"{message} [{ref}]")


class PlacementError(ValueError):
    """A placement is not an exact rotation plus translation."""


class SchemaError(ValueError):
    """A JSON document does not follow the documented schema."""


# ---------------------------------------------------------------------------
# polygons and placements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Polygon:
    """Simple polygon with counterclockwise corners and no straight corners."""

    corners: tuple[Point, ...]

    def __init__(self, corners: Iterable[Point], *, validate: bool = True):
        object.__setattr__(self, "corners", tuple(corners))
        if validate:
            self._validate()

    def _validate(self) -> None:
        pts = self.corners
        n = len(pts)
        if n < 3:
            raise PolygonError(f"a polygon needs at least 3 corners, got {n}")
        for i in range(n):
            if pts[i] == pts[(i + 1) % n]:
                raise PolygonError(f"corners {i} and {(i + 1) % n} coincide")
        for i in range(n):
            if orientation(pts[i - 1], pts[i], pts[(i + 1) % n]) == Orientation.COLLINEAR:
                raise PolygonError(f"corner {i} is collinear with its neighbours")
        sides = self.sides
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if intersect(sides[i], sides[j]).kind != "empty":
                    raise PolygonError(
                        f"sides {i} and {j} touch; pieces must be simple polygons without pinch points",
                        REF_SIMPLE,
                    )
        if sign(polygon_area2(pts)) <= 0:
            raise PolygonError("corners must be listed counterclockwise")

    def __len__(self) -> int:
        return len(self.corners)

    @property
    def sides(self) -> list[Segment]:
        n = len(self.corners)
        return [Segment(self.corners[i], self.corners[(i + 1) % n]) for i in range(n)]

    @property
    def angles(self) -> list[CornerAngle]:
        n = len(self.corners)
        return [corner_angle(self.corners[i - 1], self.corners[i], self.corners[(i + 1) % n]) for i in range(n)]

    def area(self) -> Scalar:
        return polygon_area2(self.corners) / 2

    def on_boundary(self, p: Point) -> bool:
        return any(point_on_segment(p, s) for s in self.sides)

    def contains(self, p: Point, *, closed: bool = True) -> bool:
        """Point containment; boundary points count only when ``closed``."""
        if self.on_boundary(p):
            return closed
        inside = False
        pts = self.corners
        n = len(pts)
        for i in range(n):
            a, b = pts[i], pts[(i + 1) % n]
            above_a = sign(a.y - p.y) > 0
            above_b = sign(b.y - p.y) > 0
            if above_a != above_b:
                # crossing is to the right of p iff p lies left of the upward edge
                o = orientation(a, b, p) if above_b else orientation(b, a, p)
                if o == Orientation.CCW:
                    inside = not inside
        return inside

    def squared_diameter(self) -> Scalar:
        best = Scalar(0)
        for i, p in enumerate(self.corners):
            for q in self.corners[i + 1:]:
                d = (p - q).norm2()
                if sign(d - best) > 0:
                    best = d
        return best

    def to_json(self) -> list[list[str]]:
        return [[p.x.to_text(), p.y.to_text()] for p in self.corners]


def congruent(a: Polygon, b: Polygon) -> bool:
    """Whether ``b`` is a rotated and translated copy of ``a``.

    Compares squared side lengths and corner angles under every cyclic
    relabelling; mirror images do not count.
    """
    if len(a) != len(b):
        return False
    sides_a = [s.length2() for s in a.sides]
    sides_b = [s.length2() for s in b.sides]
    angles_a = [c.angle for c in a.angles]
    angles_b = [c.angle for c in b.angles]
    n = len(a)
    for shift in range(n):
        if all(sign(sides_a[i] - sides_b[(i + shift) % n]) == 0 for i in range(n)) and all(
            angles_a[i] == angles_b[(i + shift) % n] for i in range(n)
        ):
            return True
    return False


def area(p: Polygon) -> Scalar:
    """Exact area (shoelace formula)."""
    return p.area()


@dataclass(frozen=True)
class Placement:
    """Rigid motion ``p -> R(c, s) p + (tx, ty)`` with an exact unit rotation."""

    c: Scalar
    s: Scalar
    tx: Scalar
    ty: Scalar

    def __init__(self, c, s, tx=0, ty=0):
        for name, value in (("c", c), ("s", s), ("tx", tx), ("ty", ty)):
            object.__setattr__(self, name, Scalar(value) if not isinstance(value, Scalar) else value)
        if sign(self.c * self.c + self.s * self.s - 1) != 0:
            raise PlacementError("rotation (c, s) must satisfy c^2 + s^2 = 1 exactly")

    @staticmethod
    def identity() -> "Placement":
        return Placement(1, 0, 0, 0)

    def apply(self, p: Point) -> Point:
        return Point(self.c * p.x - self.s * p.y + self.tx, self.s * p.x + self.c * p.y + self.ty)

    def rotate(self, v: Point) -> Point:
        return Point(self.c * v.x - self.s * v.y, self.s * v.x + self.c * v.y)

    def apply_polygon(self, poly: Polygon) -> Polygon:
        # a rotation keeps orientation and simplicity, so skip re-validation
        return Polygon([self.apply(p) for p in poly.corners], validate=False)

    def to_json(self) -> dict[str, str]:
        return {"c": self.c.to_text(), "s": self.s.to_text(), "tx": self.tx.to_text(), "ty": self.ty.to_text()}


@dataclass
class Dissection:
    """``k`` pieces with placements into the two targets ``P`` and ``Pprime``."""

    pieces: list[Polygon]
    targets: dict[str, Polygon]
    placements: dict[str, list[Placement]]
    name: str = ""

    def __post_init__(self) -> None:
        if set(self.targets) != set(TARGETS) or set(self.placements) != set(TARGETS):
            raise SchemaError("targets and placements must be given for both P and Pprime")
        for which in TARGETS:
            if len(self.placements[which]) != len(self.pieces):
                raise SchemaError(
                    f"{len(self.pieces)} pieces but {len(self.placements[which])} placements for {which}"
                )

    @property
    def k(self) -> int:
        return len(self.pieces)

    def placed(self, which: str) -> list[Polygon]:
        return [pl.apply_polygon(p) for pl, p in zip(self.placements[which], self.pieces)]

    def target(self, which: str) -> Polygon:
        return self.targets[which]

    def piece_sides(self) -> list[tuple[int, int]]:
        """All ``(piece, side index)`` pairs; side ``j`` runs from corner ``j`` to ``j + 1``."""
        return [(i, j) for i, p in enumerate(self.pieces) for j in range(len(p))]

    def piece_corners(self) -> list[tuple[int, int]]:
        return [(i, j) for i, p in enumerate(self.pieces) for j in range(len(p))]


# ---------------------------------------------------------------------------
# standard targets
# ---------------------------------------------------------------------------

def triangle_T() -> Polygon:
    """Equilateral triangle with side 2: (0,0), (2,0), (1, sqrt 3)."""
    return Polygon([Point(0, 0), Point(2, 0), Point(1, sqrt(3))])


def square_S() -> Polygon:
    """Square of side sqrt(sqrt 3), the same area as :func:`triangle_T`."""
    s = sqrt(sqrt(3))
    return Polygon([Point(0, 0), Point(s, 0), Point(s, s), Point(0, s)])


def classify_target(poly: Polygon) -> str | None:
    """``"T"`` for an equilateral triangle, ``"S"`` for a square, else ``None``."""
    lengths = [s.length2() for s in poly.sides]
    equal = all(sign(l - lengths[0]) == 0 for l in lengths)
    if len(poly) == 3 and equal:
        return "T"
    if len(poly) == 4 and equal and all(angle_is(a, Fraction(1, 2)) for a in poly.angles):
        return "S"
    return None


# ---------------------------------------------------------------------------
# tiling verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: str  # overlap | gap | boundary-leak | area-mismatch
    pieces: tuple[int, ...]
    witness: Point | None
    ref: str = REF_UNION

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "pieces": list(self.pieces),
            "witness": None if self.witness is None else [self.witness.x.to_text(), self.witness.y.to_text()],
            "ref": self.ref,
        }


@dataclass
class TilingReport:
    which: str
    violations: list[Violation] = field(default_factory=list)
    arrangement: Arrangement | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict[str, Any]:
        return {"target": self.which, "ok": self.ok, "violations": [v.to_json() for v in self.violations]}


def verify_tiling(d: Dissection, which: str) -> TilingReport:
    """Check that the placed pieces tile target ``which`` exactly.

    Every bounded face of the arrangement of all placed sides and the target
    boundary is tested at an exact interior sample point: faces inside the
    target must be covered by exactly one piece, faces outside by none.
    """
    if which not in TARGETS:
        raise ValueError(f"which must be one of {TARGETS}")
    report = TilingReport(which)
    target = d.target(which)
    placed = d.placed(which)
    total = sum((p.area() for p in placed), start=Scalar(0))
    if sign(total - target.area()) != 0:
        report.violations.append(Violation("area-mismatch", tuple(range(d.k)), None))
    segments = list(target.sides)
    for poly in placed:
        segments.extend(poly.sides)
    arr = build_arrangement(segments)
    labels = []
    for q in arr.sample_points:
        cover = tuple(i for i, poly in enumerate(placed) if poly.contains(q, closed=False))
        labels.append(frozenset(cover))
        inside = target.contains(q, closed=False)
        if inside and not cover:
            report.violations.append(Violation("gap", (), q))
        elif inside and len(cover) > 1:
            report.violations.append(Violation("overlap", cover, q))
        elif not inside and cover:
            report.violations.append(Violation("boundary-leak", cover, q))
    arr.face_labels = labels
    report.arrangement = arr
    return report


# ---------------------------------------------------------------------------
# corner containment checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Finding:
    """One result of :func:`check_corner_lemmas`.

    ``kind`` is ``containment`` for informational rows and one of
    ``two-triangle-corners``, ``diagonal-square-corners``, ``diameter`` or
    ``corner-count`` for violations.
    """

    kind: str
    target: str
    piece: int | None
    corners: tuple[int, ...]
    exclusive: tuple[int, ...]
    violation: bool
    ref: str
    detail: str = ""

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "target": self.target,
            "piece": self.piece,
            "corners": list(self.corners),
            "exclusive": list(self.exclusive),
            "violation": self.violation,
            "ref": self.ref,
            "detail": self.detail,
        }


def check_corner_lemmas(d: Dissection) -> list[Finding]:
    """Corner containment facts and violations for triangle and square targets.

    Containment is closed: a target corner on a piece's boundary counts as
    contained.  ``exclusive`` lists the corners no other piece contains.
    For a square target every piece's squared diameter is also compared
    against the square's squared diagonal, since any piece has to fit inside
    the square.
    """
    findings: list[Finding] = []
    kinds = {w: classify_target(d.target(w)) for w in TARGETS}
    square_diag2: Scalar | None = None
    for w in TARGETS:
        if kinds[w] == "S":
            c = d.target(w).corners
            square_diag2 = (c[0] - c[2]).norm2()
    for w in TARGETS:
        kind = kinds[w]
        if kind is None:
            continue
        target = d.target(w)
        placed = d.placed(w)
        contains = [[j for j, c in enumerate(target.corners) if poly.contains(c)] for poly in placed]
        for i, corners in enumerate(contains):
            exclusive = tuple(j for j in corners if all(j not in contains[o] for o in range(d.k) if o != i))
            ref = REF_T_VERTEX if kind == "T" else REF_S_VERTEX
            findings.append(Finding("containment", w, i, tuple(corners), exclusive, False, ref))
            if kind == "T" and len(corners) >= 2:
                findings.append(Finding(
                    "two-triangle-corners", w, i, tuple(corners), exclusive, True, REF_T_VERTEX,
                    f"piece {i} contains triangle corners {corners}",
                ))
            if kind == "S":
                for a, b in ((0, 2), (1, 3)):
                    if a in corners and b in corners:
                        findings.append(Finding(
                            "diagonal-square-corners", w, i, (a, b), exclusive, True, REF_S_VERTEX,
                            f"piece {i} contains diagonal square corners {a} and {b}",
                        ))
        if kind == "T" and d.k == 3:
            for i, corners in enumerate(contains):
                if len(corners) != 1:
                    findings.append(Finding(
                        "corner-count", w, i, tuple(corners), (), True, REF_T_VERTEX,
                        f"with three pieces each must contain exactly one triangle corner; piece {i} has {len(corners)}",
                    ))
    if square_diag2 is not None:
        for i, piece in enumerate(d.pieces):
            if sign(piece.squared_diameter() - square_diag2) > 0:
                findings.append(Finding(
                    "diameter", "", i, (), (), True, REF_T_VERTEX,
                    f"piece {i} is wider than the square's diagonal",
                ))
    return findings


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def _scalar(value: Any, where: str) -> Scalar:
    if isinstance(value, int) and not isinstance(value, bool):
        return Scalar(value)
    if not isinstance(value, str):
        raise SchemaError(f"{where}: expected a scalar expression string, got {type(value).__name__}")
    try:
        return parse_scalar(value)
    except ScalarError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def _polygon(value: Any, where: str) -> Polygon:
    if not isinstance(value, list) or not all(isinstance(c, list) and len(c) == 2 for c in value):
        raise SchemaError(f"{where}: expected a list of [x, y] pairs")
    pts = [Point(_scalar(c[0], f"{where}[{i}].x"), _scalar(c[1], f"{where}[{i}].y")) for i, c in enumerate(value)]
    try:
        return Polygon(pts)
    except PolygonError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def _placement(value: Any, where: str) -> Placement:
    if not isinstance(value, dict):
        raise SchemaError(f"{where}: expected an object with c, s, tx, ty")
    if value.get("flip"):
        raise SchemaError(f"{where}: flipped placements are not supported; pieces may only be rotated and translated")
    missing = [k for k in ("c", "s", "tx", "ty") if k not in value]
    if missing:
        raise SchemaError(f"{where}: missing fields {missing}")
    try:
        return Placement(*(_scalar(value[k], f"{where}.{k}") for k in ("c", "s", "tx", "ty")))
    except PlacementError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def load_dissection(source: str | Path | dict) -> Dissection:
    """Read a dissection from a JSON file path or an already parsed document."""
    name = ""
    if isinstance(source, (str, Path)):
        name = Path(source).stem
        try:
            doc = json.loads(Path(source).read_text())
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{source}: invalid JSON: {exc}") from exc
    else:
        doc = source
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    if doc.get("schema", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version {doc.get('schema')!r}")
    for key in ("pieces", "targets", "placements_P", "placements_Pprime"):
        if key not in doc:
            raise SchemaError(f"missing field {key!r}")
    if not isinstance(doc["pieces"], list):
        raise SchemaError("pieces must be a list")
    targets = doc["targets"]
    if not isinstance(targets, dict) or set(targets) != {"P", "Pprime"}:
        raise SchemaError("targets must be an object with keys P and Pprime")
    pieces = [_polygon(p, f"pieces[{i}]") for i, p in enumerate(doc["pieces"])]
    placements = {}
    for w in TARGETS:
        raw = doc[f"placements_{w}"]
        if not isinstance(raw, list):
            raise SchemaError(f"placements_{w} must be a list")
        placements[w] = [_placement(p, f"placements_{w}[{i}]") for i, p in enumerate(raw)]
    return Dissection(
        pieces=pieces,
        targets={w: _polygon(targets[w], f"targets.{w}") for w in TARGETS},
        placements=placements,
        name=str(doc.get("name", name)),
    )


def dump_dissection(d: Dissection) -> dict[str, Any]:
    doc: dict[str, Any] = {"schema": SCHEMA_VERSION}
    if d.name:
        doc["name"] = d.name
    doc["pieces"] = [p.to_json() for p in d.pieces]
    doc["targets"] = {w: d.targets[w].to_json() for w in TARGETS}
    for w in TARGETS:
        doc[f"placements_{w}"] = [pl.to_json() for pl in d.placements[w]]
    return doc


def identity_dissection(target: Polygon, other: Polygon | None = None) -> Dissection:
    """One piece equal to ``target`` placed by the identity into both targets."""
    return Dissection(
        pieces=[target],
        targets={"P": target, "Pprime": other if other is not None else target},
        placements={"P": [Placement.identity()], "Pprime": [Placement.identity()]},
    )
