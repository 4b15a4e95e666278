"""Families of configurations.

All constructions return a :class:`~ballpoly.hull.Configuration` whose
``meta`` records the family and parameters.
"""

from __future__ import annotations

from itertools import combinations
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .duality import canonical_duality
from .errors import (
    BallPolytopeError,
    DualEdgeConflict,
    InternalInvariantViolation,
    InvalidArcSelection,
    InvalidParity,
    InvalidSpec,
    NotExtremalInput,
    TruncationTooCoarse,
)
from .faces import FaceComplex, build_face_complex
from .geometry import DEFAULT_TOLERANCE, Tolerance, as_point, circle_distance_extremes, intersection_circle, unit
from .hull import Configuration
from .vazsonyi import check_extremal, diameter_graph

PARAM_LO, PARAM_HI = 0.05, 0.95


def _clamp(t: float) -> float:
    return float(min(max(t, PARAM_LO), PARAM_HI))


def regular_tetrahedron() -> np.ndarray:
    """Vertices of a regular tetrahedron with unit edges, centered at the origin."""
    return np.array(
        [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
    ) / (2.0 * np.sqrt(2.0))


def _arc_key(key) -> tuple:
    if isinstance(key, str):
        key = tuple(int(ch) for ch in key.strip())
    i, j = sorted(int(k) for k in key)
    if not (0 <= i < j <= 3):
        raise InvalidArcSelection(f"bad arc selector {key!r}")
    return i, j


def tetrahedron_arc_point(T: np.ndarray, i: int, j: int, t: float) -> np.ndarray:
    """Point at fraction t (from p_i) of the short arc of C_kl joining p_i and p_j."""
    k, l = [m for m in range(4) if m not in (i, j)]
    C = intersection_circle(T[k], T[l])
    ti, tj = C.angle_of(T[i]), C.angle_of(T[j])
    d = (tj - ti) % (2 * np.pi)
    if d > np.pi:
        d -= 2 * np.pi
    return C.point(ti + t * d)


def tetrahedron_with_arc_points(
    counts: Mapping, tol: Tolerance = DEFAULT_TOLERANCE
) -> Configuration:
    """Regular tetrahedron plus evenly spaced points on chosen open arcs.

    ``counts`` maps an arc selector such as ``"01"`` or ``(0, 1)`` to a
    number of points.  The arc for ``{i, j}`` is the locus at distance 1 from
    the two other vertices and inside the balls around p_i and p_j.
    Selected arcs must pairwise share an index.
    """
    T = regular_tetrahedron()
    chosen = {}
    for key, c in counts.items():
        c = int(c)
        if c < 0:
            raise InvalidSpec("point counts must be nonnegative")
        if c:
            chosen[_arc_key(key)] = chosen.get(_arc_key(key), 0) + c
    for a, b in combinations(chosen, 2):
        if not set(a) & set(b):
            raise InvalidArcSelection(f"arcs {a} and {b} are opposite")
    pts = [p for p in T]
    for (i, j), c in sorted(chosen.items()):
        for m in range(c):
            pts.append(tetrahedron_arc_point(T, i, j, _clamp(0.05 + 0.9 * (m + 1) / (c + 1))))
    meta = {"family": "tetrahedron", "counts": {f"{i}{j}": c for (i, j), c in sorted(chosen.items())}}
    return Configuration(np.array(pts), None, tol, meta)


def suspended_polygon(k: int, tol: Tolerance = DEFAULT_TOLERANCE) -> Configuration:
    """Regular (2k-1)-gon with unit main diagonals plus an apex at distance 1 from all."""
    if int(k) != k or k < 2:
        raise InvalidSpec("suspended_polygon needs an integer k >= 2")
    m = 2 * int(k) - 1
    R = 1.0 / (2.0 * np.cos(np.pi / (2 * m)))
    ang = 2 * np.pi * np.arange(m) / m
    ring = np.column_stack([R * np.cos(ang), R * np.sin(ang), np.zeros(m)])
    apex = np.array([[0.0, 0.0, np.sqrt(1.0 - R * R)]])
    return Configuration(
        np.vstack([ring, apex]), None, tol, {"family": "suspended", "k": int(k), "apex": m}
    )


def reuleaux_height(n: int) -> float:
    return float(np.sqrt(1.0 - 1.0 / (4.0 * np.cos(np.pi / (2 * n)) ** 2)))


def rugby_ball(
    n: int, h="reuleaux", include_poles: bool = False, tol: Tolerance = DEFAULT_TOLERANCE
) -> Configuration:
    """Regular n-gon on the circle where the unit spheres around (0,0,h) and (0,0,-h) meet.

    With ``h="reuleaux"`` (n odd) the main diagonals have length 1.  The
    poles get labels n and n+1 when included.
    """
    if int(n) != n or n < 3:
        raise InvalidSpec("rugby_ball needs an integer n >= 3")
    n = int(n)
    if isinstance(h, str):
        if h != "reuleaux":
            raise InvalidSpec(f"unknown height {h!r}")
        if n % 2 == 0:
            raise InvalidParity("Reuleaux tuning needs an odd number of points")
        h = reuleaux_height(n)
    h = float(h)
    if not 0.0 < h < 1.0:
        raise InvalidSpec("height must lie in (0, 1)")
    r = np.sqrt(1.0 - h * h)
    ang = 2 * np.pi * np.arange(n) / n
    pts = np.column_stack([r * np.cos(ang), r * np.sin(ang), np.zeros(n)])
    if include_poles:
        pts = np.vstack([pts, [[0.0, 0.0, h], [0.0, 0.0, -h]]])
    meta = {"family": "rugby", "n": n, "h": h, "poles": include_poles}
    return Configuration(pts, None, tol, meta)


def two_pole_family(
    h: float,
    boundary_points: Sequence[float],
    W_spec=None,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Configuration:
    """Poles p=(0,0,h), q=(0,0,-h) plus points on the arcs attached to gaps.

    ``boundary_points`` are angles of points p_0..p_{n-1} on the circle
    where S(p) and S(q) meet.  Gap i is the counterclockwise arc from p_i
    to p_{i+1}.  Its attached arc lies on the circle at distance 1 from p_i
    and p_{i+1}, runs from p to q, and passes on the far side of the chord
    from the gap; it is short exactly when the gap is.  ``W_spec`` maps a
    gap index (or lists, by position) to parameters in (0, 1) measured from
    p; the parameter 0.5 gives the in-plane point.

    Labels: p = 0, q = 1, then the placed points in gap order.  ``meta``
    holds a manifest of which gap arcs survive on the circle and which
    boundary points are isolated.
    """
    h = float(h)
    if not 0.0 < h < 1.0:
        raise InvalidSpec("height must lie in (0, 1)")
    ang = np.sort(np.mod(np.asarray(boundary_points, dtype=float), 2 * np.pi))
    n = len(ang)
    if n < 2:
        raise InvalidSpec("need at least two boundary points")
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
    if np.any(gaps <= 1e-9):
        raise InvalidSpec("boundary points must be distinct")
    if np.sum(gaps > np.pi) > 1:
        raise InvalidSpec("at most one gap may be a long arc")
    if np.any(np.abs(gaps - np.pi) <= 1e-9):
        raise InvalidSpec("a gap of exactly half the circle has no well defined attached arc")
    if W_spec is None:
        W_spec = {}
    if not isinstance(W_spec, Mapping):
        W_spec = {i: list(ts) for i, ts in enumerate(W_spec)}
    place = {int(i): [float(t) for t in ts] for i, ts in W_spec.items()}
    for i in place:
        if not 0 <= i < n:
            raise InvalidSpec(f"gap index {i} out of range")

    r = np.sqrt(1.0 - h * h)
    P = np.column_stack([r * np.cos(ang), r * np.sin(ang), np.zeros(n)])
    p, q = np.array([0.0, 0.0, h]), np.array([0.0, 0.0, -h])
    pts = [p, q]
    gap_of = []
    for i in range(n):
        ts = place.get(i, [])
        if not ts:
            continue
        a, b = P[i], P[(i + 1) % n]
        mid_ang = ang[i] + 0.5 * gaps[i]
        gap_mid = np.array([r * np.cos(mid_ang), r * np.sin(mid_ang), 0.0])
        m = 0.5 * (a + b)
        rr = np.sqrt(1.0 - 0.25 * float((a - b) @ (a - b)))
        toward = gap_mid - m
        toward -= (toward @ unit(b - a)) * unit(b - a)
        dhat = unit(toward)
        # circle through p and q in the vertical plane spanned by dhat and z
        e1 = -dhat
        ez = np.array([0.0, 0.0, 1.0])
        phi_p = np.arctan2((p - m) @ ez, (p - m) @ e1)
        for t in ts:
            if not 0.0 < t < 1.0:
                raise InvalidSpec("placement parameters must lie in (0, 1)")
            phi = phi_p * (1.0 - 2.0 * t)
            pts.append(m + rr * (np.cos(phi) * e1 + np.sin(phi) * ez))
            gap_of.append(i)
    occupied = [bool(place.get(i)) for i in range(n)]
    manifest = {
        "boundary_angles": [float(a) for a in ang],
        "long_gap": int(np.argmax(gaps)) if np.any(gaps > np.pi) else None,
        "surviving_gaps": [i for i in range(n) if not occupied[i]],
        "isolated_points": [
            (i + 1) % n for i in range(n) if occupied[i] and occupied[(i + 1) % n]
        ],
        "principal_points": [
            j for j in range(n) if occupied[j] or occupied[(j - 1) % n]
        ],
        "gap_of_point": {str(2 + k): g for k, g in enumerate(gap_of)},
    }
    meta = {"family": "two_pole", "h": h, "manifest": manifest}
    return Configuration(np.array(pts), None, tol, meta)


def _edge_sphere_hits(e, center, tol=1e-13) -> list:
    """Fractions t on the edge where the unit sphere around center is crossed."""
    L = e.length

    def f(t):
        return float(np.linalg.norm(e.point(t) - center) - 1.0)

    cuts = [0.0, 1.0]
    try:
        ext = circle_distance_extremes(e.circle, center)
        for th in ext:
            t = ((th - e.interval.start) % (2 * np.pi)) / L
            if 0.0 < t < 1.0:
                cuts.append(t)
    except BallPolytopeError:
        return []
    cuts.sort()
    roots = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        flo, fhi = f(lo), f(hi)
        if flo == 0.0:
            roots.append(lo)
        elif flo * fhi < 0:
            roots.append(brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps))
    if f(1.0) == 0.0:
        roots.append(1.0)
    return sorted(set(roots))


def ball_truncate(
    V: Configuration, c, epsilon: float, direction=None
) -> Configuration:
    """Replace the vertex c by a small facet cut out by a sphere.

    p_c is the point of the facet F_c in the given interior direction
    (default: the facet center), pushed outward to ``p_c + epsilon (p_c - c)``.
    The new configuration holds that point, the points where its unit
    sphere crosses the 1-skeleton, and V without c.
    """
    if not 0.0 < epsilon <= 0.1:
        raise InvalidSpec("epsilon must lie in (0, 0.1]")
    FC = build_face_complex(V)
    if FC.vertex_for_label(c) is None:
        raise InvalidSpec(f"point {c} is not a vertex of B(V)")
    cpt = V.point(c)
    if direction is None:
        F = FC.facets[c]
        dirs = np.array([unit(FC.vertices[v].position - cpt) for v in F.vertices])
        pc = cpt + unit(dirs.sum(axis=0))
    else:
        pc = cpt + unit(as_point(direction) - cpt)
    pnew = pc + epsilon * (pc - cpt)
    hits = []
    for e in FC.edges:
        for t in _edge_sphere_hits(e, pnew):
            x = e.point(t)
            if all(np.linalg.norm(x - y) > V.tol.vertex_merge for y in hits):
                hits.append(x)
    hits.sort(key=lambda x: tuple(np.round(x, 12)))
    keep = [l for l in V.labels if l != c]
    nxt = max(V.labels) + 1
    labels = keep + [nxt + k for k in range(1 + len(hits))]
    pts = np.vstack([V.points[[V.index(l) for l in keep]], pnew[None, :]] + [h[None, :] for h in hits])
    meta = {
        "family": "truncated",
        "source": dict(V.meta),
        "removed": c,
        "epsilon": epsilon,
        "cap_point": nxt,
        "skeleton_points": [nxt + 1 + k for k in range(len(hits))],
    }
    try:
        W = Configuration(pts, labels, V.tol, meta)
        verdict = check_extremal(W)
    except BallPolytopeError as exc:
        raise TruncationTooCoarse(f"truncation failed ({exc}); try a smaller epsilon") from exc
    if not verdict.is_extremal:
        raise TruncationTooCoarse(
            f"result has e={verdict.e_count}, not {verdict.bound}; try a smaller epsilon"
        )
    return W


def add_dangling_vertices(
    V: Configuration, placements: Sequence, FC: Optional[FaceComplex] = None
) -> Configuration:
    """Add points inside edges of B(V); each becomes a dangling vertex.

    ``placements`` is a list of (edge id, parameter in (0, 1)) referring to
    ``build_face_complex(V)``.  An edge and its dual edge may not both
    receive points.  The returned ``meta['manifest']`` records, per added
    point, the split edges and their dual edges in the new complex.
    """
    if FC is None:
        FC = build_face_complex(V)
    phi = canonical_duality(FC)
    eids = [int(e) for e, _ in placements]
    for e in eids:
        if not 0 <= e < FC.e:
            raise InvalidSpec(f"no edge {e}")
    used = set(eids)
    for e in used:
        if phi.edge_to_edge[e] in used:
            raise DualEdgeConflict(f"edges {e} and {phi.edge_to_edge[e]} are dual")
    nxt = max(V.labels) + 1
    new_pts, new_labels, rows = [], [], []
    for k, (e, t) in enumerate(placements):
        t = float(t)
        if not 0.0 < t < 1.0:
            raise InvalidSpec("placement parameters must lie in (0, 1)")
        edge = FC.edges[int(e)]
        new_pts.append(edge.point(_clamp(t)))
        new_labels.append(nxt + k)
        ends = tuple(FC.vertices[v].label for v in edge.endpoints)
        dual = FC.edges[phi.edge_to_edge[int(e)]]
        rows.append(
            {
                "label": nxt + k,
                "edge": int(e),
                "endpoints": list(ends),
                "generator_pair": list(edge.generator_pair),
                "dual_edge": dual.id,
                "dual_endpoints": [FC.vertices[v].label for v in dual.endpoints],
            }
        )
    W = Configuration(
        np.vstack([V.points, np.array(new_pts).reshape(-1, 3)]),
        list(V.labels) + new_labels,
        V.tol,
        {"family": "dangling", "source": dict(V.meta)},
    )
    verdict = check_extremal(W)
    if not verdict.is_extremal:
        raise NotExtremalInput(f"result has e={verdict.e_count}, expected {verdict.bound}")
    FC2 = verdict.face_complex
    # verdict.face_complex lives on the rescaled copy; labels are shared
    phi2 = canonical_duality(FC2)
    for row in rows:
        x = FC2.vertex_for_label(row["label"])
        if x is None or not x.is_dangling:
            raise InternalInvariantViolation(f"point {row['label']} is not a dangling vertex")
        split = [e.id for e in FC2.edges if x.id in e.endpoints]
        row["split_edges"] = split
        row["split_duals"] = [phi2.edge_to_edge[s] for s in split]
        row["split_dual_generators"] = [list(FC2.edges[phi2.edge_to_edge[s]].generator_pair) for s in split]
    return W.with_meta(manifest=rows)
