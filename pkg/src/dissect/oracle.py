"""Double-precision cross-checks for the exact verifier.

Nothing here decides anything: the exact kernel is authoritative.  These
helpers recompute a verdict in floating point so that a disagreement can be
reported as a kernel bug.  Polygon overlap uses shapely, imported on first
use; install the ``oracle`` extra to enable it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

from .dissection import TARGETS, Dissection, verify_tiling
from .kernel import Scalar

__all__ = ["OracleUnavailable", "float_value", "FloatTiling", "float_tiling", "cross_check", "DUDENEY_TOLERANCE", "DEFAULT_TOLERANCE"]

DUDENEY_TOLERANCE = 1e-12
DEFAULT_TOLERANCE = 1e-9


class OracleUnavailable(RuntimeError):
    """shapely is not installed."""


def _shapely():
    try:
        from shapely.geometry import Polygon as FloatPolygon
        from shapely.ops import unary_union
    except ImportError as exc:  # pragma: no cover - depends on the environment
        raise OracleUnavailable("the float oracle needs shapely; pip install 'artifact[oracle]'") from exc
    return FloatPolygon, unary_union


def float_value(x: Scalar) -> float:
    """Evaluate the expression DAG of ``x`` in plain floating point, without intervals."""
    memo: dict[int, float] = {}

    def ev(node: Scalar) -> float:
        key = id(node)
        if key in memo:
            return memo[key]
        q = node.rational
        if q is not None:
            val = q.numerator / q.denominator
        else:
            args = [ev(a) for a in node.args]
            op = node.op
            if op == "add":
                val = args[0] + args[1]
            elif op == "sub":
                val = args[0] - args[1]
            elif op == "mul":
                val = args[0] * args[1]
            elif op == "div":
                val = args[0] / args[1]
            elif op == "sqrt":
                val = math.sqrt(args[0])
            else:  # pragma: no cover - the DAG has no other operations
                raise ValueError(f"unknown operation {op!r}")
        memo[key] = val
        return val

    return ev(x)


@dataclass
class FloatTiling:
    which: str
    overlap_area: float
    gap_area: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.overlap_area <= self.tolerance and self.gap_area <= self.tolerance

    def to_json(self) -> dict[str, Any]:
        return {
            "target": self.which,
            "ok": self.ok,
            "overlap_area": self.overlap_area,
            "gap_area": self.gap_area,
            "tolerance": self.tolerance,
        }


def float_tiling(d: Dissection, which: str, tolerance: float = DEFAULT_TOLERANCE) -> FloatTiling:
    """Pairwise overlap area and uncovered area of the placed pieces, in floating point."""
    FloatPolygon, unary_union = _shapely()
    to_float = lambda poly: FloatPolygon([(float(p.x), float(p.y)) for p in poly.corners])  # noqa: E731
    placed = [to_float(p) for p in d.placed(which)]
    target = to_float(d.target(which))
    overlap = 0.0
    for i, a in enumerate(placed):
        for b in placed[i + 1:]:
            overlap += a.intersection(b).area
    union = unary_union(placed)
    gap = target.difference(union).area + union.difference(target).area
    return FloatTiling(which, overlap, gap, tolerance)


def cross_check(d: Dissection, tolerance: float = DEFAULT_TOLERANCE) -> dict[str, Any]:
    """Compare the exact and float tiling verdicts for both targets."""
    rows = []
    for which in TARGETS:
        exact = verify_tiling(d, which).ok
        approx = float_tiling(d, which, tolerance)
        row = approx.to_json()
        row["exact_ok"] = exact
        row["agree"] = exact == approx.ok
        rows.append(row)
    return {"tolerance": tolerance, "targets": rows, "agree": all(r["agree"] for r in rows)}
