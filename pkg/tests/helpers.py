"""Builders for small dissections shared across the test modules."""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

from dissect.cutgraph import build_cut_graph
from dissect.dissection import Dissection, Placement, Polygon, load_dissection, square_S, triangle_T
from dissect.geom import Point
from dissect.kernel import sqrt
from dissect.matching import build_edge_diagram, build_vertex_diagram

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "dissect" / "fixtures"
IDENTITY = Placement.identity()


def pts(*coords) -> list[Point]:
    return [Point(x, y) for x, y in coords]


def poly(*coords) -> Polygon:
    return Polygon(pts(*coords))


@lru_cache(maxsize=None)
def fixture(name: str) -> Dissection:
    return load_dissection(FIXTURES / f"{name}.json")


def diagrams(d: Dissection):
    """Cut graphs and both matching diagrams of ``d``: (gP, gPprime, ed, vd)."""
    gP, gQ = build_cut_graph(d, "P"), build_cut_graph(d, "Pprime")
    return gP, gQ, build_edge_diagram(d, gP, gQ), build_vertex_diagram(d, gP, gQ)


@lru_cache(maxsize=None)
def fixture_diagrams(name: str):
    """:func:`diagrams` of a packaged fixture, built once per session."""
    return diagrams(fixture(name))


def same_in_both(pieces: list[Polygon], target: Polygon, name: str = "") -> Dissection:
    """Pieces placed by the identity into two copies of one target."""
    return Dissection(
        pieces=pieces,
        targets={"P": target, "Pprime": target},
        placements={"P": [IDENTITY] * len(pieces), "Pprime": [IDENTITY] * len(pieces)},
        name=name,
    )


def chord_cut_triangle(a: Fraction, b: Fraction) -> Dissection:
    """The triangle cut by one chord from side 0 (at parameter ``a``) to side 1 (at ``b``).

    Side 0 runs (0,0)->(2,0) and side 1 runs (2,0)->(1, sqrt 3); both
    parameters lie strictly between 0 and 1, so the chord cuts off corner 1.
    """
    t = triangle_T()
    A, B, C = t.corners
    p = A + (B - A).scale(a)
    q = B + (C - B).scale(b)
    corner = Polygon([p, B, q])
    rest = Polygon([A, p, q, C])
    return same_in_both([rest, corner], t, "chord")


def triangle_to_parallelogram() -> Dissection:
    """Cut the triangle along its horizontal midline and swing the top half over.

    The top triangle turns half a circle about the right end of the midline,
    giving a parallelogram with the same base.
    """
    t = triangle_T()
    A, B, C = t.corners
    h = sqrt(3) / 2
    left, right = Point(Fraction(1, 2), h), Point(Fraction(3, 2), h)
    trapezoid = Polygon([A, B, right, left])
    top = Polygon([left, right, C])
    parallelogram = Polygon([A, B, Point(Fraction(5, 2), h), left])
    return Dissection(
        pieces=[trapezoid, top],
        targets={"P": t, "Pprime": parallelogram},
        placements={"P": [IDENTITY, IDENTITY], "Pprime": [IDENTITY, Placement(-1, 0, 3, sqrt(3))]},
        name="parallelogram",
    )


def two_squares() -> Dissection:
    """A 2x1 rectangle cut into unit squares and restacked as a 1x2 rectangle."""
    a = poly((0, 0), (1, 0), (1, 1), (0, 1))
    b = poly((1, 0), (2, 0), (2, 1), (1, 1))
    return Dissection(
        pieces=[a, b],
        targets={"P": poly((0, 0), (2, 0), (2, 1), (0, 1)), "Pprime": poly((0, 0), (1, 0), (1, 2), (0, 2))},
        placements={"P": [IDENTITY, IDENTITY], "Pprime": [IDENTITY, Placement(1, 0, -1, 1)]},
        name="two-squares",
    )


def notch() -> Dissection:
    """A 2x2 square with its top-right unit square moved to the lower right.

    The inner corner of the L-shaped piece is a paired vertex in the square.
    """
    ell = poly((0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2))
    unit = poly((1, 1), (2, 1), (2, 2), (1, 2))
    return Dissection(
        pieces=[ell, unit],
        targets={"P": poly((0, 0), (2, 0), (2, 2), (0, 2)), "Pprime": poly((0, 0), (3, 0), (3, 1), (1, 1), (1, 2), (0, 2))},
        placements={"P": [IDENTITY, IDENTITY], "Pprime": [IDENTITY, Placement(1, 0, 1, -1)]},
        name="notch",
    )


def square_diagonals() -> Dissection:
    """The unit square cut along both diagonals, same placement in both copies."""
    s = poly((0, 0), (1, 0), (1, 1), (0, 1))
    h = Fraction(1, 2)
    pieces = [
        poly((0, 0), (1, 0), (h, h)),
        poly((1, 0), (1, 1), (h, h)),
        poly((1, 1), (0, 1), (h, h)),
        poly((0, 1), (0, 0), (h, h)),
    ]
    return same_in_both(pieces, s, "diagonals")


def standard_targets() -> tuple[Polygon, Polygon]:
    return triangle_T(), square_S()


def side_profile(g):
    """Per target side: (boundary vertices strictly inside it, whether both end corners are uncut).

    Walks the cycle of boundary edges and counts internal edges at corners
    straight from the edge list.
    """
    nxt: dict[int, list[int]] = {}
    internal_at = Counter()
    for u, v, kind in g.edges:
        if kind == "boundary":
            nxt.setdefault(u, []).append(v)
            nxt.setdefault(v, []).append(u)
        else:
            internal_at[u] += 1
            internal_at[v] += 1
    corners = [v for v in range(g.n) if g.types[v].value == "corner"]
    cycle, prev, cur = [corners[0]], None, corners[0]
    while True:
        step = next(w for w in nxt[cur] if w != prev) if prev is not None else nxt[cur][0]
        if step == corners[0]:
            break
        cycle.append(step)
        prev, cur = cur, step
    at = [i for i, v in enumerate(cycle) if v in corners] + [len(cycle)]
    sides = []
    for a, b in zip(at, at[1:]):
        far = cycle[b % len(cycle)]
        sides.append((b - a - 1, internal_at[cycle[a]] == 0 and internal_at[far] == 0))
    return sides


def recount(c):
    """(U-shaped sides, flat vertices, trisected sides) of a class, counted from its edges."""
    sides = side_profile(c.graph)
    u_shaped = sum(1 for inside, uncut in sides if inside == 0 and uncut)
    trisected = sum(1 for inside, _ in sides if inside == 2)
    flat = sum(1 for t in c.graph.types if t.value == "flat")
    return u_shaped, flat, trisected
