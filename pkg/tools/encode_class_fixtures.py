"""Write the cut-graph class fixtures from a hand-written drawing table.

Each entry below was transcribed by hand from the class drawings: which two-cut
topology the class uses, where each cut end sits on the target and the type
of every internal meeting point.  The entries are turned into combinatorial
graphs by :func:`dissect.enumerate.build_disk_graph` and frozen as JSON.  The
enumerator never reads this table; the tests compare its output against the
frozen files.

Host notation: ``(j, 0)`` is corner j, ``(j, r)`` is the r-th point along the
side that starts at corner j (counterclockwise).

Run:  python3 tools/encode_class_fixtures.py
"""

from __future__ import annotations

from pathlib import Path

from dissect.cutgraph import canonicalize
from dissect.enumerate import DiskCut, build_disk_graph
from dissect.jsonio import write

c0, c1, c2, c3 = (0, 0), (1, 0), (2, 0), (3, 0)
# side points: sJ_r is the r-th point on the side starting at corner J
s0_1, s0_2, s0_3 = (0, 1), (0, 2), (0, 3)
s1_1, s1_2 = (1, 1), (1, 2)
s2_1, s2_2 = (2, 1), (2, 2)
s3_1 = (3, 1)

TRIANGLE = {
    # a degree-3 internal vertex joined to one point on each side
    "D1": DiskCut("D", (s0_1, s1_1, s2_1), ("convex",)),
    "D2": DiskCut("D", (s0_1, s1_1, s2_1), ("flat",)),
    "D3": DiskCut("D", (s0_1, s1_1, s2_1), ("reflex",)),
    # two cuts fanning out from one side point to the two other sides
    "E1": DiskCut("E", (s0_1, s1_1, s2_1)),
    # two corners cut off, trisecting the side between them
    "F1": DiskCut("F", (s2_1, s0_1, s0_2, s1_1)),
}

_D_PLACEMENTS = {
    # the three arms of the degree-3 vertex
    1: (s0_1, s0_2, s2_1),  # two arms on one side, one opposite
    2: (s0_1, s1_1, s2_1),  # three consecutive sides
    3: (c0, s1_1, s2_1),  # a corner and the two far sides
    4: (c0, s0_1, s2_1),  # a corner, a point on its next side, the opposite side
    5: (c0, c1, s2_1),  # both corners of one side and the opposite side
}

SQUARE = {
    # lens on the interior of a cut between opposite sides
    "A1": DiskCut("A", (s0_1, s2_1), ("convex", "convex"), 1),
    "A2": DiskCut("A", (s0_1, s2_1), ("convex", "flat"), 1),
    "A3": DiskCut("A", (s0_1, s2_1), ("flat", "flat"), 1),
    "A4": DiskCut("A", (s0_1, s2_1), ("convex", "reflex"), 1),
    "A5": DiskCut("A", (s0_1, s2_1), ("flat", "reflex"), 1),
    "A6": DiskCut("A", (s0_1, s2_1), ("reflex", "reflex"), 1),
    # lens from a side point to the middle of a cut across the square
    "B1": DiskCut("B", (s0_1, s2_1), ("convex",), 1),
    "B2": DiskCut("B", (s0_1, s2_1), ("flat",), 1),
    "B3": DiskCut("B", (s0_1, s2_1), ("reflex",), 1),
    # lens between points on opposite sides
    "C1": DiskCut("C", (s0_1, s2_1), (), 1),
    # fans from a side point
    "E1": DiskCut("E", (s0_2, s2_1, s0_1)),
    "E2": DiskCut("E", (s0_1, s1_1, s2_1)),
    "E3": DiskCut("E", (s0_1, s2_1, s2_2)),
    "E4": DiskCut("E", (s0_1, s1_1, s3_1)),
    "E5": DiskCut("E", (s0_1, c0, s2_1)),
    "E6": DiskCut("E", (s0_1, c2, s2_1)),
    "E7": DiskCut("E", (s0_1, c2, s3_1)),
    "E8": DiskCut("E", (s0_1, c2, c3)),
    # two cuts with four distinct ends
    "F1": DiskCut("F", (s0_1, s2_2, s0_2, s2_1)),  # a strip between opposite sides
    "F2": DiskCut("F", (s0_2, s1_1, s0_1, s2_1)),  # one corner cut off, one cut across
    "F3": DiskCut("F", (s0_2, s1_1, s0_1, s3_1)),  # two corners cut off, one side trisected
    "F4": DiskCut("F", (s0_1, s0_2, s0_3, s2_1)),  # a notch on a side, one cut across
    "F5": DiskCut("F", (c0, s0_1, s0_2, s2_1)),
    "F6": DiskCut("F", (c0, s0_1, s1_1, s3_1)),
    "F7": DiskCut("F", (c0, s1_1, s1_2, s2_1)),
    "F8": DiskCut("F", (c0, c1, s1_1, s3_1)),  # a cut between the corners of one side
    "F9": DiskCut("F", (c0, s1_1, s1_2, s3_1)),
    "F10": DiskCut("F", (c0, s1_1, c3, s1_2)),
    "F11": DiskCut("F", (s0_1, s0_2, s1_1, s3_1)),  # a notch on a side, one corner cut off
}
for i, kind in enumerate(("convex", "flat", "reflex")):
    for p, hosts in _D_PLACEMENTS.items():
        SQUARE[f"D{5 * i + p}"] = DiskCut("D", hosts, (kind,))


def main() -> None:
    root = Path(__file__).resolve().parents[1] / "src" / "dissect" / "fixtures" / "classes"
    for old in root.glob("g[ts]_*.json"):
        old.unlink()
    for target, prefix, table in (("T", "gt", TRIANGLE), ("S", "gs", SQUARE)):
        for name, cut in table.items():
            label = f"G{target}_{name}"
            g = canonicalize(build_disk_graph(target, cut, label=label, family=name[0]))
            doc = g.to_json()
            doc["drawing"] = {
                "topology": cut.topology,
                "hosts": [list(h) for h in cut.hosts],
                "internal": list(cut.internal),
                "side": cut.side,
            }
            write(doc, root / f"{prefix}_{name}.json")
    print(f"wrote {len(TRIANGLE)} triangle and {len(SQUARE)} square classes to {root}")


if __name__ == "__main__":
    main()
