"""Command-line front end.

Commands::

    dissect verify FILE          tiling, corner checks and matching-diagram checks
    dissect invariants FILE      cut-graph vertex types, cc-diff, tri-diff, class match
    dissect diagram FILE         edge and vertex diagrams as DOT, SVG or JSON
    dissect enumerate --target T enumerate cut-graph classes and compare with the fixtures
    dissect filter               cc-diff and tri-diff tables, feasible pairs, cases

Exit codes: 0 success, 1 a check failed, 2 bad usage or an unreadable input.
Reports are JSON with ``"schema": 1`` unless ``--format text`` is given.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .cutgraph import build_cut_graph, canonical_code, cc_diff, to_combinatorial, tri_diff
from .dissection import (
    TARGETS,
    Dissection,
    SchemaError,
    check_corner_lemmas,
    classify_target,
    load_dissection,
    verify_tiling,
)
from .enumerate import completeness, enumerate_classes, json_report, label_key, load_class_fixtures, text_report
from .jsonio import dumps, write
from .matching import (
    CorrespondenceError,
    build_edge_diagram,
    build_vertex_diagram,
    check_all,
    to_dot,
    to_svg,
    u_shape_analysis,
)

log = logging.getLogger("dissect")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
SCHEMA = 1


class UsageError(Exception):
    """Bad input that should end the run with exit code 2."""


def _header(command: str) -> dict[str, Any]:
    return {"schema": SCHEMA, "tool": f"dissect {__version__}", "command": command}


def _load(path: str) -> Dissection:
    if not Path(path).is_file():
        raise UsageError(f"{path}: no such file")
    try:
        return load_dissection(path)
    except SchemaError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _emit(args: argparse.Namespace, doc: dict[str, Any], text: str | None, name: str) -> None:
    """Print or write a report in the requested format."""
    body = text if args.format == "text" and text is not None else dumps(doc)
    if args.out:
        suffix = "txt" if args.format == "text" and text is not None else "json"
        path = Path(args.out) / f"{name}.{suffix}"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(body)
        log.info("wrote %s", path)
    else:
        sys.stdout.write(body)


def _oracle(d: Dissection) -> dict[str, Any]:
    from .oracle import DEFAULT_TOLERANCE, DUDENEY_TOLERANCE, OracleUnavailable, cross_check

    tolerance = DUDENEY_TOLERANCE if d.name == "dudeney" else DEFAULT_TOLERANCE
    try:
        return cross_check(d, tolerance)
    except OracleUnavailable as exc:
        return {"available": False, "detail": str(exc)}


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def verify_report(d: Dissection, oracle: bool = False) -> tuple[dict[str, Any], bool]:
    """Full verification report and whether every check passed."""
    doc = _header("verify")
    doc["name"] = d.name
    tilings = [verify_tiling(d, w) for w in TARGETS]
    doc["tiling"] = [t.to_json() for t in tilings]
    ok = all(t.ok for t in tilings)

    kinds = {classify_target(d.target(w)) for w in TARGETS}
    findings = check_corner_lemmas(d)
    lemma_setting = kinds == {"T", "S"}
    doc["corner_lemmas"] = {
        "applies": lemma_setting,
        "findings": [f.to_json() for f in findings],
    }
    if lemma_setting and any(f.violation for f in findings):
        ok = False

    if not all(t.ok for t in tilings):
        doc["matching"] = {"status": "skipped", "detail": "the pieces do not tile both targets"}
    else:
        try:
            gP, gQ = build_cut_graph(d, "P"), build_cut_graph(d, "Pprime")
            ed = build_edge_diagram(d, gP, gQ)
            vd = build_vertex_diagram(d, gP, gQ)
        except CorrespondenceError as exc:
            doc["matching"] = {"status": "error", "detail": str(exc)}
            ok = False
        else:
            report = check_all(ed, vd)
            doc["matching"] = report.to_json()
            ok = ok and report.ok
            square = next((g for g in (gP, gQ) if g.target_kind == "S"), None)
            if square is not None:
                doc["u_shape"] = u_shape_analysis(square, ed, vd)
            doc["soft_flags"] = {"P": gP.soft_flags, "Pprime": gQ.soft_flags}
    if oracle:
        doc["oracle"] = _oracle(d)
        if doc["oracle"].get("agree") is False:
            log.error("float oracle disagrees with the exact kernel; treat this as a kernel bug")
            ok = False
    doc["ok"] = ok
    return doc, ok


def _verify_text(doc: dict[str, Any]) -> str:
    lines = [f"{doc['name'] or 'dissection'}: {'ok' if doc['ok'] else 'FAILED'}"]
    for t in doc["tiling"]:
        kinds = sorted({v["kind"] for v in t["violations"]})
        lines.append(f"  tiling {t['target']:<6} {'ok' if t['ok'] else 'violations: ' + ', '.join(kinds)}")
    note = "" if doc["corner_lemmas"]["applies"] else " (informational: targets are not a triangle and a square)"
    for f in doc["corner_lemmas"]["findings"]:
        if f["violation"]:
            lines.append(f"  corner {f['kind']}: {f['detail']} [{f['ref']}]{note}")
    matching = doc.get("matching", {})
    for c in matching.get("checks", []):
        lines.append(f"  {c['name']:<16} {c['status']:<20} [{c['ref']}]")
    if "detail" in matching:
        lines.append(f"  matching {matching['status']}: {matching['detail']}")
    return "\n".join(lines) + "\n"


def cmd_verify(args: argparse.Namespace) -> int:
    d = _load(args.file)
    doc, ok = verify_report(d, oracle=args.oracle)
    _emit(args, doc, _verify_text(doc), f"{d.name or 'dissection'}_verify")
    return EXIT_OK if ok else EXIT_FAILED


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

def invariants_report(d: Dissection) -> dict[str, Any]:
    doc = _header("invariants")
    doc["name"] = d.name
    doc["targets"] = {}
    for w in TARGETS:
        g = build_cut_graph(d, w)
        entry: dict[str, Any] = {
            "kind": g.target_kind,
            "vertex_types": g.type_counts(),
            "vertices": len(g.vertices),
            "edges": len(g.edges),
            "faces": len(g.faces),
            "cc_diff": cc_diff(g),
            "tri_diff": str(tri_diff(g)),
        }
        if g.target_kind in ("T", "S") and d.k == 3:
            code = canonical_code(to_combinatorial(g))
            match = [c.label for c in load_class_fixtures(g.target_kind) if canonical_code(c.graph) == code]
            entry["class"] = match[0] if match else None
        doc["targets"][w] = entry
    return doc


def cmd_invariants(args: argparse.Namespace) -> int:
    d = _load(args.file)
    doc = invariants_report(d)
    lines = [f"{d.name or 'dissection'}"]
    for w, e in doc["targets"].items():
        types = ", ".join(f"{k} {v}" for k, v in sorted(e["vertex_types"].items()))
        lines.append(f"  {w:<6} {e['kind'] or '-'}  {types}  cc-diff {e['cc_diff']}  tri-diff {e['tri_diff']}")
    _emit(args, doc, "\n".join(lines) + "\n", f"{d.name or 'dissection'}_invariants")
    return EXIT_OK


# ---------------------------------------------------------------------------
# diagram
# ---------------------------------------------------------------------------

def cmd_diagram(args: argparse.Namespace) -> int:
    d = _load(args.file)
    for w in TARGETS:
        report = verify_tiling(d, w)
        if not report.ok:
            log.error("the pieces do not tile %s; no diagram drawn", w)
            return EXIT_FAILED
    gP, gQ = build_cut_graph(d, "P"), build_cut_graph(d, "Pprime")
    try:
        ed = build_edge_diagram(d, gP, gQ)
        vd = build_vertex_diagram(d, gP, gQ)
    except CorrespondenceError as exc:
        log.error("%s", exc)
        return EXIT_FAILED
    name = d.name or "dissection"
    fmt = args.format or "dot"
    if fmt == "dot":
        files = {f"{name}_ed.dot": to_dot(ed), f"{name}_vd.dot": to_dot(vd)}
    elif fmt == "svg":
        files = {f"{name}_cutgraphs.svg": to_svg(vd)}
    elif fmt == "json":
        doc = _header("diagram")
        doc["edge_diagram"] = ed.to_json()
        doc["vertex_diagram"] = vd.to_json()
        files = {f"{name}_diagrams.json": dumps(doc)}
    else:
        raise UsageError("diagram supports --format dot, svg or json")
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    for fname, body in files.items():
        (out / fname).write_text(body)
        print(out / fname)
    return EXIT_OK


# ---------------------------------------------------------------------------
# enumerate and filter
# ---------------------------------------------------------------------------

def cmd_enumerate(args: argparse.Namespace) -> int:
    target = args.target
    classes = enumerate_classes(target, load_class_fixtures(target))
    report = completeness(target)
    if args.out:
        out = Path(args.out)
        for c in classes:
            graph = c.graph.to_json()
            graph["invariants"] = c.invariants()
            write(graph, out / f"{c.label}.json")
        log.info("wrote %d classes to %s", len(classes), out)
    doc = _header("enumerate")
    doc["target"] = target
    doc["classes"] = [c.to_json() for c in sorted(classes, key=lambda c: label_key(c.label))]
    doc["completeness"] = report.to_json()
    lines = [f"{len(classes)} classes for {target}"]
    for c in sorted(classes, key=lambda c: label_key(c.label)):
        lines.append(f"  {c.label:<10} cc-diff {c.cc_diff:>3}  tri-diff {str(c.tri_diff):>8}")
    lines.append(f"  bijective with the fixtures: {report.ok}")
    body = "\n".join(lines) + "\n" if args.format == "text" else dumps(doc)
    sys.stdout.write(body)
    return EXIT_OK if report.ok else EXIT_FAILED


def cmd_filter(args: argparse.Namespace) -> int:
    t_classes, s_classes = load_class_fixtures("T"), load_class_fixtures("S")
    doc = json_report(t_classes, s_classes)
    doc.update({k: v for k, v in _header("filter").items() if k != "schema"})
    text = text_report(t_classes, s_classes)
    if args.format in (None, "text"):
        args.format = "text"
    _emit(args, doc, text, "filter")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="DIR", help="write output files to DIR instead of stdout")
    common.add_argument("--format", choices=("json", "dot", "svg", "text"), help="output format")
    common.add_argument("--oracle", action="store_true", help="cross-check the tiling in floating point (needs shapely)")
    common.add_argument("-v", "--verbose", action="count", default=0, help="log progress to stderr")

    parser = argparse.ArgumentParser(prog="dissect", description="Exact verification of polygon dissections.")
    parser.add_argument("--version", action="version", version=f"dissect {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="verify a dissection file")
    p.add_argument("file")
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("invariants", parents=[common], help="cut-graph invariants of a dissection file")
    p.add_argument("file")
    p.set_defaults(run=cmd_invariants)

    p = sub.add_parser("diagram", parents=[common], help="export the matching diagrams")
    p.add_argument("file")
    p.set_defaults(run=cmd_diagram)

    p = sub.add_parser("enumerate", parents=[common], help="enumerate cut-graph classes")
    p.add_argument("--target", choices=("T", "S"), required=True)
    p.set_defaults(run=cmd_enumerate)

    p = sub.add_parser("filter", parents=[common], help="run the feasibility filter over the class fixtures")
    p.set_defaults(run=cmd_filter)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    run: Callable[[argparse.Namespace], int] = args.run
    try:
        return run(args)
    except UsageError as exc:
        print(f"dissect: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
