"""Sampling oracles and the invariant suite behind ``--verify``.

The oracles never look at how the face complex was built: they sample the
sphere around each generator or shoot rays to the boundary and decide
membership by computing distances to every point of V.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BallPolytopeError
from .faces import FaceComplex, build_face_complex, edge_is_short, is_two_connected, vertex_valence_check
from .geometry import _frame_for_normal, unit
from .hull import Configuration, in_ball_set


def ray_boundary_points(V: Configuration, n: int, rng: np.random.Generator) -> np.ndarray:
    """Boundary points of B(V) hit by rays from the circumcenter in random directions."""
    o = V.circumball.center
    u = rng.normal(size=(n, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    d = o - V.points  # (m, 3)
    b = u @ d.T  # <u, o - v>
    c = np.sum(d * d, axis=1) - 1.0
    s = -b + np.sqrt(b * b - c)
    return o + s.min(axis=1)[:, None] * u


def generator_sets(V: Configuration, pts: np.ndarray, shell: float) -> np.ndarray:
    """Boolean matrix: point k is within ``shell`` of the unit sphere around v."""
    D = np.linalg.norm(pts[:, None, :] - V.points[None, :, :], axis=2)
    return np.abs(D - 1.0) <= shell


def stratum_census(V: Configuration, n: int, shell: float, rng) -> dict:
    """How often each generator set occurs among sampled boundary points."""
    out = {}
    for k in range(0, n, 200_000):
        pts = ray_boundary_points(V, min(200_000, n - k), rng)
        G = generator_sets(V, pts, shell)
        keys, counts = np.unique(G, axis=0, return_counts=True)
        for row, c in zip(keys, counts):
            key = frozenset(V.labels[i] for i in np.flatnonzero(row))
            out[key] = out.get(key, 0) + int(c)
    return out


@dataclass
class OracleResult:
    checked: int = 0
    skipped: int = 0
    disagreements: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements


def _facet_predicate(FC: FaceComplex, lab, x: np.ndarray) -> np.ndarray:
    """Membership in F_p as described by the complex.

    Each boundary edge owns the wedge of directions (around the facet axis)
    between its endpoints; a sphere point is inside when it lies in the cap
    cut by the circle carrying the edge of its wedge.
    """
    V = FC.config
    F = FC.facets[lab]
    p = V.point(lab)
    u, w = _frame_for_normal(F.axis)

    def ang(y):
        d = y - p
        return np.mod(np.arctan2(d @ w, d @ u), 2 * np.pi)

    starts = np.array([ang(FC.vertices[v].position) for v in F.vertices])
    others = []
    for eid in F.edges:
        a, b = FC.edges[eid].generator_pair
        others.append(V.point(b if a == lab else a))
    others = np.array(others)
    t = ang(x)
    # wedge k runs counterclockwise from vertex k to vertex k+1
    rel = np.mod(t[:, None] - starts[None, :], 2 * np.pi)
    span = np.mod(np.roll(starts, -1) - starts, 2 * np.pi)
    inside_wedge = rel < span[None, :]
    k = np.argmax(inside_wedge, axis=1)
    q = others[k]
    wedge_gap = np.min(np.minimum(rel, 2 * np.pi - rel), axis=1)
    off_axis = np.linalg.norm(np.cross(x - p, F.axis), axis=1)
    return np.linalg.norm(x - q, axis=1) <= 1.0, wedge_gap * off_axis


def boundary_oracle(FC: FaceComplex, n_samples: int, rng, shell: float = 1e-6) -> OracleResult:
    """Compare the complex with brute-force classification of sampled points.

    Two sample families, half each:

    * rays from the circumcenter to the boundary; a point whose generator set
      is a single p must lie in F_p according to the complex;
    * points on the sphere around each generator near its facet; the complex's
      inside/outside answer must match the distance test against all of V.

    Points within ``shell`` of a second sphere, or of a wedge boundary, are
    skipped.
    """
    V = FC.config
    res = OracleResult()
    half = n_samples // 2
    labels = np.array(V.labels)

    # ray samples
    for start in range(0, half, 250_000):
        m = min(250_000, half - start)
        pts = ray_boundary_points(V, m, rng)
        G = generator_sets(V, pts, shell)
        cnt = G.sum(axis=1)
        res.skipped += int(np.sum(cnt != 1))
        single = cnt == 1
        owner = labels[np.argmax(G, axis=1)]
        for lab in np.unique(owner[single]):
            sel = single & (owner == lab)
            if lab not in FC.facets:
                res.disagreements.append(("missing facet", int(lab), int(sel.sum())))
                continue
            inside, gap = _facet_predicate(FC, lab, pts[sel])
            near = gap < shell
            res.skipped += int(near.sum())
            res.checked += int((~near).sum())
            bad = ~inside & ~near
            if bad.any():
                res.disagreements.append(("ray sample outside facet", int(lab), int(bad.sum())))

    # sphere samples near each facet
    per = max(1, (n_samples - half) // max(1, FC.f))
    for lab in sorted(FC.facets):
        F = FC.facets[lab]
        p = V.point(lab)
        vdirs = np.array([unit(FC.vertices[v].position - p) for v in F.vertices])
        mids = np.array([unit(FC.edges[e].midpoint - p) for e in F.edges])
        reach = float(np.max(np.arccos(np.clip(np.vstack([vdirs, mids]) @ F.axis, -1, 1))))
        reach = min(reach + 0.2, np.pi / 2)
        # uniform on the cap of angular radius `reach` around the axis
        cz = rng.uniform(np.cos(reach), 1.0, per)
        phi = rng.uniform(0, 2 * np.pi, per)
        u, w = _frame_for_normal(F.axis)
        sz = np.sqrt(1 - cz * cz)
        dirs = (cz[:, None] * F.axis + sz[:, None] * (np.cos(phi)[:, None] * u + np.sin(phi)[:, None] * w))
        x = p + dirs
        D = np.linalg.norm(x[:, None, :] - V.points[None, :, :], axis=2)
        D[:, V.index(lab)] = 0.0
        truth = D.max(axis=1) <= 1.0
        near = np.any(np.abs(D - 1.0) <= shell, axis=1)
        pred, gap = _facet_predicate(FC, lab, x)
        near |= gap < shell
        res.skipped += int(near.sum())
        res.checked += int((~near).sum())
        bad = (pred != truth) & ~near
        if bad.any():
            res.disagreements.append(("sphere sample misclassified", int(lab), int(bad.sum())))
    return res


def run_invariants(
    V: Configuration, seed: int = 0, samples: int = 20_000, FC: Optional[FaceComplex] = None
) -> list:
    """Every structural check that applies to V; returns a list of problems."""
    from .duality import barycentric_subdivision, canonical_duality, is_fixed_point_free
    from .vazsonyi import check_extremal, diameter_graph

    problems = []
    rng = np.random.default_rng(seed)
    if V.n >= 2:
        small = V.diam <= 1.0 + V.tol.eq_dist
        inside = all(in_ball_set(V, x) for x in V.points)
        if small != inside:
            problems.append("diam <= 1 does not match V inside B(V)")
    if V.n < 3:
        return problems
    try:
        FC = FC or build_face_complex(V)
    except BallPolytopeError as exc:
        return problems + [f"face complex: {type(exc).__name__}: {exc}"]
    if FC.v - FC.e + FC.f != 2:
        problems.append("Euler relation fails")
    if not is_two_connected(FC):
        problems.append("1-skeleton is not 2-connected")
    val = vertex_valence_check(FC)
    if not val.ok:
        problems.append(f"valence census fails at vertices {val.failures}")
    for e in FC.edges:
        try:
            edge_is_short(FC, e.id)
        except BallPolytopeError as exc:
            problems.append(str(exc))
    for x in FC.vertices:
        if x.kind == "principal" and len(x.incident_generators) < 3:
            problems.append(f"principal vertex {x.id} on fewer than three facets")
    orc = boundary_oracle(FC, samples, rng)
    if not orc.ok:
        problems.append(f"boundary oracle: {orc.disagreements}")
    if V.n >= 4:
        try:
            verdict = check_extremal(V)
        except BallPolytopeError as exc:
            return problems + [f"extremality: {type(exc).__name__}: {exc}"]
        if verdict.is_extremal:
            Vs = V.scaled(1.0 / V.diam)
            FCs = verdict.face_complex
            if any(not e.is_short for e in FCs.edges):
                problems.append("extremal configuration with a long edge")
            if min(diameter_graph(Vs).degrees().values()) < 2:
                problems.append("extremal configuration with a point of valence below 2")
            try:
                d = canonical_duality(FCs)
                rep = is_fixed_point_free(d, barycentric_subdivision(FCs))
                if not (rep.fixed_point_free and rep.vertex_disjoint):
                    problems.append("canonical duality has fixed cells")
            except BallPolytopeError as exc:
                problems.append(f"duality: {type(exc).__name__}: {exc}")
    return problems
