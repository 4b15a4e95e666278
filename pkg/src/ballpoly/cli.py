"""Command line interface.

Exit codes: 0 success, 1 malformed input or unusable configuration,
2 failed verification, 3 tolerance conflict.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import __version__
from .checks import run_invariants
from .duality import (
    apexed_prism_complex,
    barycentric_subdivision,
    canonical_duality,
    enumerate_self_dualities,
    is_fixed_point_free,
)
from .errors import (
    BallPolytopeError,
    DualityFailure,
    GhsCrossCheckFailure,
    InternalInvariantViolation,
    ParseError,
    ToleranceConflict,
)
from .faces import build_face_complex
from .generators import (
    ball_truncate,
    rugby_ball,
    suspended_polygon,
    tetrahedron_with_arc_points,
    two_pole_family,
)
from .io import (
    dumps_report,
    export_dot,
    export_mesh,
    face_complex_summary,
    format_configuration,
    input_manifest,
    parse_tolerance_flag,
    read_configuration,
    tolerance_from_override,
    _write_text,
)
from .vazsonyi import check_extremal, critical_core, diameter_graph

EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_TOLERANCE = 0, 1, 2, 3


class VerificationFailed(Exception):
    pass


def _global_flags(parser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--tolerance", default=d, help="eq_dist, or key=value pairs separated by commas")
    parser.add_argument("--seed", type=int, default=d if suppress else 0, help="seed for sampling checks")
    parser.add_argument("--verify", action="store_true", default=d if suppress else False,
                        help="run the invariant suite and fail on any violation")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    p = argparse.ArgumentParser(prog="ballpoly", description="Ball polytope face structure and extremality.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("faces", parents=[common], help="face complex of B(V)")
    s.add_argument("input")
    s.add_argument("--report")
    s.add_argument("--mesh")
    s.add_argument("--mesh-format", choices=["off", "obj"], default="off")
    s.add_argument("--arc-step", type=float, default=5.0)
    s.add_argument("--skeleton")

    s = sub.add_parser("diameter-graph", parents=[common], help="diameter graph of V")
    s.add_argument("input")
    s.add_argument("--dot")

    s = sub.add_parser("check-extremal", parents=[common], help="is e(V) = 2n - 2?")
    s.add_argument("input")

    s = sub.add_parser("critical-core", parents=[common], help="largest critical subconfiguration")
    s.add_argument("input")
    s.add_argument("--out")

    s = sub.add_parser("duality", parents=[common], help="canonical self-duality")
    s.add_argument("input")
    s.add_argument("--report")

    s = sub.add_parser("generate", parents=[common], help="write a configuration from a family")
    s.add_argument("family", choices=["tetrahedron", "suspended", "rugby", "two-pole", "truncated"])
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--n", type=int, default=5)
    s.add_argument("--h", default="reuleaux")
    s.add_argument("--poles", action="store_true")
    s.add_argument("--counts", default="", help="arc counts, e.g. 01=2,02=1")
    s.add_argument("--angles", default="", help="boundary angles in radians, comma separated")
    s.add_argument("--place", action="append", default=[],
                   help="gap:t1,t2,... placements for two-pole (repeatable)")
    s.add_argument("--epsilon", type=float, default=0.05)
    s.add_argument("--out")

    s = sub.add_parser("prism-dualities", parents=[common], help="self-dualities of an apexed prism")
    s.add_argument("--n", type=int, required=True)
    return p


def _tolerance_override(args) -> Optional[dict]:
    return parse_tolerance_flag(args.tolerance) if args.tolerance else None


def _load(args):
    return read_configuration(args.input, _tolerance_override(args))


def _emit(report: dict, path: Optional[str] = None):
    text = dumps_report(report)
    sys.stdout.write(text)
    if path:
        _write_text(path, text)


def _verify(args, V, report: dict):
    if not args.verify:
        return
    problems = run_invariants(V, seed=args.seed)
    report["verification"] = {"ok": not problems, "problems": problems}
    if problems:
        raise VerificationFailed(report)


def _cmd_faces(args):
    V = _load(args)
    FC = build_face_complex(V)
    report = {"input": input_manifest(V, args.input)}
    report.update(face_complex_summary(FC))
    if args.mesh:
        report["mesh"] = export_mesh(FC, args.mesh, args.arc_step, args.mesh_format)
    if args.skeleton:
        export_dot(FC, args.skeleton, "skeleton")
    _verify(args, V, report)
    _emit(report, args.report)


def _cmd_diameter_graph(args):
    V = _load(args)
    G = diameter_graph(V)
    report = {
        "input": input_manifest(V, args.input),
        "diam": G.diam,
        "e": G.e,
        "edges": [list(e) for e in G.edges],
        "spectral_gap": G.spectral_gap,
        "valences": {str(k): v for k, v in sorted(G.degrees().items())},
    }
    if args.dot:
        export_dot(G, args.dot, "diameter")
    _verify(args, V, report)
    _emit(report)


def _cmd_check_extremal(args):
    V = _load(args)
    verdict = check_extremal(V)
    report = {"input": input_manifest(V, args.input)}
    report.update(verdict.as_dict())
    _verify(args, V, report)
    _emit(report)


def _cmd_critical_core(args):
    V = _load(args)
    core = critical_core(V)
    report = {
        "input": input_manifest(V, args.input),
        "core_labels": list(core.labels),
        "removed": [l for l in V.labels if l not in core.labels],
    }
    if args.out:
        _write_text(args.out, format_configuration(core))
    _verify(args, V, report)
    _emit(report)


def _cmd_duality(args):
    V = _load(args)
    verdict = check_extremal(V)
    report = {"input": input_manifest(V, args.input), "extremality": verdict.as_dict()}
    FC = verdict.face_complex
    d = canonical_duality(FC)
    rep = is_fixed_point_free(d, barycentric_subdivision(FC))
    report["face_counts"] = {"v": FC.v, "e": FC.e, "f": FC.f, "euler": FC.v - FC.e + FC.f}
    report["duality"] = {
        "canonical_found": True,
        "fixed_point_free": rep.fixed_point_free,
        "vertex_disjoint": rep.vertex_disjoint,
        "vertex_to_facet": {str(FC.vertices[v].label): F for v, F in sorted(d.vertex_to_facet.items())},
        "edge_to_edge": {str(k): v for k, v in sorted(d.edge_to_edge.items())},
    }
    _verify(args, V, report)
    _emit(report, args.report)


def _floats(text: str) -> list:
    return [float(t) for t in text.split(",") if t.strip()]


def _cmd_generate(args):
    tol, note = tolerance_from_override(_tolerance_override(args))
    fam = args.family
    if fam == "tetrahedron":
        counts = {}
        for part in filter(None, args.counts.split(",")):
            key, _, c = part.partition("=")
            counts[key.strip()] = int(c)
        V = tetrahedron_with_arc_points(counts, tol)
    elif fam == "suspended":
        V = suspended_polygon(args.k, tol)
    elif fam == "rugby":
        h = args.h if args.h == "reuleaux" else float(args.h)
        V = rugby_ball(args.n, h, args.poles, tol)
    elif fam == "two-pole":
        h = 0.5 if args.h == "reuleaux" else float(args.h)
        place = {}
        for item in args.place:
            g, _, ts = item.partition(":")
            place[int(g)] = _floats(ts)
        V = two_pole_family(h, _floats(args.angles), place, tol)
    else:
        base = suspended_polygon(args.k, tol)
        V = ball_truncate(base, base.meta["apex"], args.epsilon)
    if note:
        V = V.with_meta(tolerance_note=note)
    if args.verify:
        problems = run_invariants(V, seed=args.seed)
        if problems:
            raise VerificationFailed({"verification": {"ok": False, "problems": problems}})
    text = format_configuration(V)
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)


def _cmd_prism(args):
    C = apexed_prism_complex(args.n)
    found = enumerate_self_dualities(C)
    report = {
        "n": args.n,
        "counts": {"v": C.counts[0], "e": C.counts[1], "f": C.counts[2]},
        "total": len(found),
        "fixed_point_free": sum(r.report.fixed_point_free for r in found),
        "vertex_disjoint": sum(r.report.vertex_disjoint for r in found),
        "dualities": [
            {
                "vertex_to_facet": dict(sorted(r.duality.vertex_to_facet.items())),
                "fixed_point_free": r.report.fixed_point_free,
            }
            for r in found
        ],
    }
    _emit(report)


COMMANDS = {
    "faces": _cmd_faces,
    "diameter-graph": _cmd_diameter_graph,
    "check-extremal": _cmd_check_extremal,
    "critical-core": _cmd_critical_core,
    "duality": _cmd_duality,
    "generate": _cmd_generate,
    "prism-dualities": _cmd_prism,
}


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    for name, val in (("seed", 0), ("verify", False), ("tolerance", None)):
        if getattr(args, name, None) is None:
            setattr(args, name, val)
    try:
        COMMANDS[args.command](args)
    except VerificationFailed as exc:
        sys.stdout.write(dumps_report(exc.args[0]))
        print("error: verification failed", file=sys.stderr)
        return EXIT_VERIFY
    except ToleranceConflict as exc:
        print(f"error: tolerance conflict: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (GhsCrossCheckFailure, InternalInvariantViolation, DualityFailure) as exc:
        print(f"error: verification failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except ParseError as exc:
        print(f"error: parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (BallPolytopeError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def main():
    sys.exit(cli_main())
