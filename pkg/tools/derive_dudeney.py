"""Derive the four-piece hinged triangle/square fixture from its construction.

Triangle: A=(0,0), B=(2,0), C=(1, sqrt 3).  D and E are the midpoints of AC
and BC.  J lies on AB with |EJ| equal to the square's side sqrt(sqrt 3), and
K = J + (1, 0).  L and M are the feet of the perpendiculars from D and K onto
EJ.  The four pieces hinge at D, E and K; swinging them half a turn about the
hinges assembles a square, which is then rotated into axis-aligned position.

Before writing, the result is checked three ways: exact tiling of both
targets, the float oracle at tolerance 1e-12, and exact congruence of every
placed piece with its template.  The single-piece square and triangle
fixtures are written alongside.

Run from the repository root:  python3 tools/derive_dudeney.py
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from dissect.dissection import (
    TARGETS,
    Dissection,
    Placement,
    Polygon,
    congruent,
    dump_dissection,
    identity_dissection,
    square_S,
    triangle_T,
    verify_tiling,
)
from dissect.geom import Point, dot
from dissect.jsonio import write as write_json
from dissect.kernel import sqrt
from dissect.oracle import DUDENEY_TOLERANCE, float_tiling

HALF = Fraction(1, 2)


def derive() -> Dissection:
    r3 = sqrt(3)
    sigma = sqrt(r3)
    w = sqrt(r3 - Fraction(3, 4))
    A, B, C = Point(0, 0), Point(2, 0), Point(1, r3)
    D = Point(HALF, r3 * HALF)
    E = Point(Fraction(3, 2), r3 * HALF)
    J = Point(Fraction(3, 2) - w, 0)
    K = Point(Fraction(5, 2) - w, 0)
    u = E - J  # direction of the long cut, |u| = sigma
    assert u.norm2() == r3
    # feet of perpendiculars: (D - J).u = sqrt3 - w and (K - J).u = w
    assert dot(D - J, u) == r3 - w and dot(K - J, u) == w
    L = J + u.scale((r3 - w) / r3)
    M = J + u.scale(w / r3)
    assert dot(D - L, u) == 0 and dot(K - M, u) == 0

    pieces = [
        Polygon([A, J, L, D]),
        Polygon([D, L, E, C]),
        Polygon([J, K, M]),
        Polygon([K, B, E, M]),
    ]
    # half turns about the hinges, expressed as (c, s, t) with p -> R p + t
    half_about = lambda h: (-1, 0, h.scale(2))  # noqa: E731
    hinge = [
        (1, 0, (E - D).scale(2)),  # half turn about D, then about E
        half_about(E),
        half_about(K),
        (1, 0, Point(0, 0)),
    ]
    # rotate the assembled square so the long cut's direction becomes +x
    c, s = u.x / sigma, -u.y / sigma
    rot = Placement(c, s, 0, 0)
    raw = []
    for ci, si, t in hinge:
        cc = c * ci - s * si
        ss = s * ci + c * si
        raw.append((cc, ss, rot.rotate(t)))
    # translate so the assembled square has its lower-left corner at the origin
    pts = [
        Point(cc * p.x - ss * p.y + t.x, ss * p.x + cc * p.y + t.y)
        for (cc, ss, t), poly in zip(raw, pieces)
        for p in poly.corners
    ]
    xmin = min(pts, key=lambda p: float(p.x)).x
    ymin = min(pts, key=lambda p: float(p.y)).y
    placements_S = [Placement(cc, ss, t.x - xmin, t.y - ymin) for cc, ss, t in raw]
    placements_T = [Placement.identity() for _ in pieces]
    return Dissection(
        pieces=pieces,
        targets={"P": triangle_T(), "Pprime": square_S()},
        placements={"P": placements_T, "Pprime": placements_S},
        name="dudeney",
    )


def validate(d: Dissection) -> None:
    for which in TARGETS:
        report = verify_tiling(d, which)
        assert report.ok, report.to_json()
        approx = float_tiling(d, which, DUDENEY_TOLERANCE)
        assert approx.ok, approx.to_json()
        for piece, placed in zip(d.pieces, d.placed(which)):
            assert congruent(piece, placed)


def main() -> None:
    root = Path(__file__).resolve().parents[1] / "src" / "dissect" / "fixtures"
    d = derive()
    validate(d)
    square = identity_dissection(square_S())
    square.name = "square"
    triangle = identity_dissection(triangle_T())
    triangle.name = "triangle"
    for fixture in (d, square, triangle):
        out = write_json(dump_dissection(fixture), root / f"{fixture.name}.json")
        print(f"wrote {out}")


if __name__ == "__main__":
    main()
