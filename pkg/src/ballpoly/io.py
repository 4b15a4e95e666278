"""Configuration files, reports, meshes and graph exports.

Configuration files are JSON::

    {"points": [[x, y, z], ...], "labels": [...], "tolerance": {"eq_dist": 1e-9}}

``labels`` and ``tolerance`` are optional.  Floats are written with the
shortest repr that round-trips, so reading a written file gives back the
identical configuration.
"""

from __future__ import annotations

import io as _io
import json
import math
import re
import sys
from decimal import Decimal
from pathlib import Path
from typing import Optional, Union

import networkx as nx
import numpy as np

from .duality import facet_center
from .errors import EmptyInput, ParseError, ToleranceConflict
from .faces import FaceComplex
from .geometry import DEFAULT_TOLERANCE, Tolerance, unit
from .hull import Configuration
from .vazsonyi import DiameterGraph

PathLike = Union[str, Path]

# ----------------------------------------------------------------------------
# Reading


def _line_at(text: str, offset: int) -> int:
    return text.count("\n", 0, offset) + 1


def _element_offsets(text: str, key: str) -> list:
    """Offsets of the elements of the top-level array stored under key."""
    m = re.search(r'"%s"\s*:\s*\[' % re.escape(key), text)
    if not m:
        return []
    i = m.end()
    depth, offs, in_str = 1, [], False
    expect = True
    while i < len(text) and depth > 0:
        ch = text[i]
        if in_str:
            if ch == "\\":
                i += 1
            elif ch == '"':
                in_str = False
        elif ch == '"':
            in_str = True
            if depth == 1 and expect:
                offs.append(i)
                expect = False
        elif ch in "[{":
            if depth == 1 and expect:
                offs.append(i)
                expect = False
            depth += 1
        elif ch in "]}":
            depth -= 1
        elif ch == "," and depth == 1:
            expect = True
        elif depth == 1 and expect and not ch.isspace():
            offs.append(i)
            expect = False
        i += 1
    return offs


def _reject_constant(name):
    raise ValueError(f"non-finite number {name}")


def parse_configuration(text: str, tol_override: Optional[dict] = None) -> Configuration:
    """Parse configuration JSON text.  Errors carry 1-based line numbers."""
    bad = re.search(r"\b(NaN|-?Infinity)\b", text)
    if bad:
        raise ParseError(f"non-finite number {bad.group(0)}", _line_at(text, bad.start()))
    try:
        doc = json.loads(text, parse_float=Decimal, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", 1)
    unknown = set(doc) - {"points", "labels", "tolerance", "meta"}
    if unknown:
        raise ParseError(f"unknown keys {sorted(unknown)}", 1)
    pts = doc.get("points")
    if pts is None:
        raise ParseError("missing 'points'", 1)
    if not isinstance(pts, list):
        raise ParseError("'points' must be a list", _line_at(text, text.find('"points"')))
    if len(pts) == 0:
        raise EmptyInput("configuration has no points")
    offs = _element_offsets(text, "points")
    coords = []
    for i, p in enumerate(pts):
        line = _line_at(text, offs[i]) if i < len(offs) else None
        if not isinstance(p, list) or len(p) != 3:
            raise ParseError(f"point {i} must be a list of three numbers", line)
        row = []
        for c in p:
            if isinstance(c, bool) or not isinstance(c, (int, Decimal)):
                raise ParseError(f"point {i} has a non-numeric coordinate", line)
            f = float(c)
            if not math.isfinite(f):
                raise ParseError(f"point {i} has a coordinate out of range", line)
            row.append(f)
        coords.append(row)
    labels = doc.get("labels")
    if labels is not None:
        if (
            not isinstance(labels, list)
            or len(labels) != len(pts)
            or not all(isinstance(l, int) and not isinstance(l, bool) for l in labels)
            or len(set(labels)) != len(labels)
        ):
            raise ParseError("'labels' must be distinct integers, one per point",
                             _line_at(text, text.find('"labels"')))
    tdoc = doc.get("tolerance") or {}
    if not isinstance(tdoc, dict):
        raise ParseError("'tolerance' must be an object", _line_at(text, text.find('"tolerance"')))
    tvals = DEFAULT_TOLERANCE.as_dict()
    given = set()
    defaults = DEFAULT_TOLERANCE.as_dict()
    override = tol_override or {}
    for k, v in list(tdoc.items()) + list(override.items()):
        if k not in tvals:
            raise ParseError(f"unknown tolerance key {k!r}", _line_at(text, max(text.find(f'"{k}"'), 0)))
        try:
            tvals[k] = float(v)
        except (TypeError, ValueError):
            raise ParseError(f"tolerance {k} must be a number", None)
        # written files carry every key; a default value there is not a user choice
        if k in override or tvals[k] != defaults[k]:
            given.add(k)
    meta = _plain(doc.get("meta")) if isinstance(doc.get("meta"), dict) else {}
    tvals, note = _widen_merge_radius(tvals, given)
    if note:
        meta["tolerance_note"] = note
    tol = Tolerance(**tvals)
    return Configuration(np.array(coords), labels, tol, meta)


def _widen_merge_radius(tvals: dict, given: set):
    """Keep vertex_merge above a user-raised eq_dist when it was not set explicitly."""
    if "vertex_merge" in given or tvals["eq_dist"] < tvals["vertex_merge"]:
        return tvals, None
    new = min(100.0 * tvals["eq_dist"], 0.5e-3)
    out = dict(tvals, vertex_merge=new)
    return out, f"vertex_merge raised to {new:g} to stay above eq_dist"


def tolerance_from_override(override: Optional[dict] = None):
    """Default tolerance with overrides applied; returns (Tolerance, note or None)."""
    tvals = DEFAULT_TOLERANCE.as_dict()
    tvals.update({k: float(v) for k, v in (override or {}).items()})
    tvals, note = _widen_merge_radius(tvals, set(override or {}))
    return Tolerance(**tvals), note


def parse_tolerance_flag(spec: str) -> dict:
    """``"1e-8"`` (eq_dist) or ``"eq_dist=1e-8,vertex_merge=1e-6"``."""
    spec = spec.strip()
    out = {}
    if "=" not in spec:
        try:
            return {"eq_dist": float(spec)}
        except ValueError:
            raise ParseError(f"bad tolerance {spec!r}")
    for part in spec.split(","):
        k, _, v = part.partition("=")
        k = k.strip()
        if k not in DEFAULT_TOLERANCE.as_dict():
            raise ParseError(f"unknown tolerance key {k!r}")
        try:
            out[k] = float(v)
        except ValueError:
            raise ParseError(f"bad tolerance value {v!r}")
    return out


def read_configuration(path: PathLike, tol_override: Optional[dict] = None) -> Configuration:
    """Read a configuration file; ``"-"`` reads standard input."""
    if str(path) == "-":
        text = sys.stdin.read()
    else:
        text = Path(path).read_text()
    return parse_configuration(text, tol_override)


def format_configuration(V: Configuration, include_meta: bool = True) -> str:
    lines = ["{", '  "points": [']
    rows = [f"    [{repr(float(x))}, {repr(float(y))}, {repr(float(z))}]" for x, y, z in V.points]
    lines.append(",\n".join(rows))
    lines.append("  ],")
    lines.append(f'  "labels": {json.dumps(list(V.labels))},')
    tail = f'  "tolerance": {json.dumps(V.tol.as_dict(), sort_keys=True)}'
    if include_meta and V.meta:
        tail += ",\n" + f'  "meta": {json.dumps(_plain(V.meta), sort_keys=True)}'
    lines.append(tail)
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_configuration(V: Configuration, path: PathLike) -> None:
    _write_text(path, format_configuration(V))


def _write_text(path: PathLike, text: str) -> None:
    if str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# ----------------------------------------------------------------------------
# Reports


def _plain(obj, digits: Optional[int] = None):
    """JSON-ready copy: numpy scalars and arrays become Python values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        seq = sorted(obj, key=repr) if isinstance(obj, (set, frozenset)) else obj
        return [_plain(v, digits) for v in seq]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist(), digits)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating, Decimal)):
        f = float(obj)
        if digits is not None and math.isfinite(f):
            f = float(f"{f:.{digits}g}")
            if f == 0.0:
                f = 0.0
        return f
    return obj


def dumps_report(report: dict) -> str:
    """Deterministic JSON: sorted keys, floats at 12 significant digits."""
    return json.dumps(_plain(report, 12), sort_keys=True, indent=2) + "\n"


def face_complex_summary(FC: FaceComplex) -> dict:
    from .faces import euler_characteristic, is_two_connected

    return {
        "v": FC.v,
        "e": FC.e,
        "f": FC.f,
        "euler": euler_characteristic(FC),
        "two_connected": is_two_connected(FC),
        "vertices": [
            {
                "id": x.id,
                "kind": x.kind,
                "label": x.label,
                "position": x.position,
                "generators": sorted(x.incident_generators),
            }
            for x in FC.vertices
        ],
        "edges": [
            {
                "id": e.id,
                "endpoints": list(e.endpoints),
                "generators": list(e.generator_pair),
                "length": e.length,
                "short": e.is_short,
            }
            for e in FC.edges
        ],
        "facets": [
            {
                "generator": F.generator,
                "vertices": list(F.vertices),
                "edges": list(F.edges),
                "digonal": F.is_digonal,
            }
            for _, F in sorted(FC.facets.items())
        ],
    }


def input_manifest(V: Configuration, source: Optional[str] = None) -> dict:
    return {
        "source": source,
        "n": V.n,
        "labels": list(V.labels),
        "tolerance": V.tol.as_dict(),
        "meta": _plain(V.meta),
        "warnings": [V.meta["tolerance_note"]] if "tolerance_note" in V.meta else [],
    }


# ----------------------------------------------------------------------------
# Meshes


def _facet_ring(FC: FaceComplex, F, polylines) -> list:
    ring = []
    for i, eid in enumerate(F.edges):
        e = FC.edges[eid]
        pts = polylines[eid]
        if e.endpoints[0] != F.vertices[i]:
            pts = pts[::-1]
        ring.extend(pts[:-1])
    return ring


def mesh_arrays(FC: FaceComplex, arc_step: float = 5.0):
    """Triangulated boundary as (vertices, triangles).

    Edge polylines are computed once and shared by both incident facets, so
    the mesh is closed.  Each facet is fanned from its center with rings of
    points pushed onto the facet's sphere.
    """
    if arc_step <= 0:
        raise ValueError("arc_step must be positive")
    step = np.radians(arc_step)
    polylines = {}
    for e in FC.edges:
        k = max(1, int(math.ceil(e.length / step)))
        pts = [tuple(p) for p in e.point(np.linspace(0.0, 1.0, k + 1))]
        pts[0] = tuple(FC.vertices[e.endpoints[0]].position)
        pts[-1] = tuple(FC.vertices[e.endpoints[1]].position)
        polylines[e.id] = pts
    index, verts, tris = {}, [], []

    def vid(p):
        p = tuple(float(c) for c in p)
        if p not in index:
            index[p] = len(verts)
            verts.append(p)
        return index[p]

    V = FC.config
    for lab in sorted(FC.facets):
        F = FC.facets[lab]
        p = V.point(lab)
        z = facet_center(FC, lab)
        ring = _facet_ring(FC, F, polylines)
        zd = unit(z - p)
        spread = max(float(np.arccos(np.clip(unit(np.array(b) - p) @ zd, -1, 1))) for b in ring)
        m = max(1, int(math.ceil(spread / step)))
        levels = [[vid(z)] * len(ring)]
        for j in range(1, m):
            s = j / m
            levels.append([vid(p + unit((1 - s) * (z - p) + s * (np.array(b) - p))) for b in ring])
        levels.append([vid(b) for b in ring])
        K = len(ring)
        for j in range(m):
            lo, hi = levels[j], levels[j + 1]
            for k in range(K):
                k2 = (k + 1) % K
                if j == 0:
                    tris.append((lo[0], hi[k], hi[k2]))
                else:
                    tris.append((lo[k], hi[k], hi[k2]))
                    tris.append((lo[k], hi[k2], lo[k2]))
    return np.array(verts), np.array(tris, dtype=int)


def mesh_area(verts: np.ndarray, tris: np.ndarray) -> float:
    a, b, c = verts[tris[:, 0]], verts[tris[:, 1]], verts[tris[:, 2]]
    return float(0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1).sum())


def export_mesh(FC: FaceComplex, path: PathLike, arc_step: float = 5.0, fmt: str = "off") -> dict:
    """Write the boundary mesh as OFF (default) or OBJ; returns mesh statistics."""
    verts, tris = mesh_arrays(FC, arc_step)
    out = _io.StringIO()
    if fmt == "off":
        out.write("OFF\n")
        out.write(f"{len(verts)} {len(tris)} 0\n")
        for x, y, z in verts:
            out.write(f"{float(x)!r} {float(y)!r} {float(z)!r}\n")
        for a, b, c in tris:
            out.write(f"3 {a} {b} {c}\n")
    elif fmt == "obj":
        for x, y, z in verts:
            out.write(f"v {float(x)!r} {float(y)!r} {float(z)!r}\n")
        for a, b, c in tris:
            out.write(f"f {a + 1} {b + 1} {c + 1}\n")
    else:
        raise ValueError(f"unknown mesh format {fmt!r}")
    _write_text(path, out.getvalue())
    return {"vertices": len(verts), "triangles": len(tris), "area": mesh_area(verts, tris)}


def read_off(path: PathLike):
    tokens = Path(path).read_text().split()
    if tokens[0] != "OFF":
        raise ParseError("not an OFF file", 1)
    nv, nf = int(tokens[1]), int(tokens[2])
    vals = tokens[4:]
    verts = np.array(vals[: 3 * nv], dtype=float).reshape(nv, 3)
    rest = vals[3 * nv:]
    tris = np.array(rest, dtype=int).reshape(nf, 4)[:, 1:]
    return verts, tris


# ----------------------------------------------------------------------------
# Graphs


def _as_multigraph(graph) -> nx.MultiGraph:
    if isinstance(graph, DiameterGraph):
        G = nx.MultiGraph()
        G.add_nodes_from(graph.labels)
        G.add_edges_from(graph.edges)
        return G
    if isinstance(graph, FaceComplex):
        return graph.skeleton()
    if isinstance(graph, (nx.Graph, nx.MultiGraph)):
        return nx.MultiGraph(graph)
    raise TypeError(f"cannot export {type(graph).__name__} as a graph")


def format_dot(graph, name: str = "G") -> str:
    G = _as_multigraph(graph)
    lines = [f"graph {name} {{"]
    for v in sorted(G.nodes, key=repr):
        lines.append(f'  "{v}";')
    pairs = sorted((tuple(sorted((a, b), key=repr)) for a, b in G.edges()), key=repr)
    for a, b in pairs:
        lines.append(f'  "{a}" -- "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(graph, path: PathLike, name: str = "G") -> None:
    """Write a diameter graph, face complex skeleton or networkx graph as DOT."""
    _write_text(path, format_dot(graph, name))
