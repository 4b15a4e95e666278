"""Spherical face complex of a ball polytope.

The boundary of ``B(V)`` is covered by facets ``F_p`` (the part of the unit
sphere around p that lies in every other ball).  Two facets meet along arcs
of the circle ``C_pq``; the arcs are cut into edges at vertices.  Principal
vertices lie on three or more facets, dangling vertices are points of V on
exactly two facets that subdivide an arc.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import networkx as nx
import numpy as np
from scipy.spatial import cKDTree

from .errors import (
    InternalInvariantViolation,
    NonGenericUnsupported,
    NotTight,
    ToleranceConflict,
)
from .geometry import (
    DEFAULT_TOLERANCE,
    TWO_PI,
    AngularInterval,
    AngularIntervalSet,
    Circle3,
    _frame_for_normal,
    ball_arc_on_circle,
    canon_angle,
    interval_set_intersect,
    intersection_circle,
    make_interval,
    unit,
)
from .hull import Configuration, EssentialityReport, essential_points, in_ball_set

PRINCIPAL = "principal"
DANGLING = "dangling"


@dataclass(frozen=True, eq=False)
class Vertex:
    id: int
    position: np.ndarray
    kind: str
    incident_generators: frozenset
    label: Optional[int] = None  # point of V sitting at this vertex, if any

    @property
    def is_dangling(self) -> bool:
        return self.kind == DANGLING


@dataclass(frozen=True, eq=False)
class Edge:
    """Arc of ``C_pq`` between two vertices.

    ``endpoints[0]`` sits at ``interval.start``.  The circle's normal points
    from ``generator_pair[0]`` to ``generator_pair[1]``.
    """

    id: int
    circle: Circle3
    generator_pair: tuple
    interval: AngularInterval
    endpoints: tuple
    is_short: bool
    hedge: int = 0

    @property
    def length(self) -> float:
        return self.interval.length

    def point(self, t):
        """Point at fraction t of the arc, measured from endpoints[0]."""
        return self.circle.point(self.interval.start + np.asarray(t) * self.length)

    @property
    def midpoint(self) -> np.ndarray:
        return self.point(0.5)


@dataclass(frozen=True, eq=False)
class Facet:
    """Facet ``F_p``; edges[i] runs from vertices[i] to vertices[i+1].

    The circuit is counterclockwise when seen from outside the polytope.
    """

    generator: int
    vertices: tuple
    edges: tuple
    axis: np.ndarray
    is_digonal: bool

    @property
    def boundary(self) -> list:
        out = []
        for v, e in zip(self.vertices, self.edges):
            out += [("v", v), ("e", e)]
        return out


@dataclass(eq=False)
class FaceComplex:
    config: Configuration
    vertices: tuple
    edges: tuple
    facets: dict
    components: dict = field(default_factory=dict)
    essentiality: Optional[EssentialityReport] = None

    @property
    def v(self) -> int:
        return len(self.vertices)

    @property
    def e(self) -> int:
        return len(self.edges)

    @property
    def f(self) -> int:
        return len(self.facets)

    @property
    def counts(self) -> tuple:
        return self.v, self.e, self.f

    @property
    def principal_vertices(self):
        return [x for x in self.vertices if x.kind == PRINCIPAL]

    @property
    def dangling_vertices(self):
        return [x for x in self.vertices if x.kind == DANGLING]

    def valence(self, vid: int) -> int:
        return sum((e.endpoints[0] == vid) + (e.endpoints[1] == vid) for e in self.edges)

    def skeleton(self) -> nx.MultiGraph:
        G = nx.MultiGraph()
        G.add_nodes_from(x.id for x in self.vertices)
        for e in self.edges:
            G.add_edge(*e.endpoints, key=e.id)
        return G

    def vertex_for_label(self, label):
        for x in self.vertices:
            if x.label == label:
                return x
        return None

    def edge_facets(self, eid: int) -> tuple:
        return self.edges[eid].generator_pair

    def vertex_positions(self) -> np.ndarray:
        return np.array([x.position for x in self.vertices])

    def __repr__(self):
        return f"FaceComplex(v={self.v}, e={self.e}, f={self.f})"


# ----------------------------------------------------------------------------
# Pair components


def _pair_components(V: Configuration, i: int, j: int):
    tol = V.tol
    P = V.points
    circle = intersection_circle(P[i], P[j], tol)
    comps = AngularIntervalSet.full()
    for k in range(V.n):
        if k == i or k == j:
            continue
        comps = interval_set_intersect(comps, ball_arc_on_circle(circle, P[k], tol), tol.angle_eps)
        if comps.is_empty:
            break
    if V.n >= 3 and comps.full_circle:
        raise InternalInvariantViolation(
            f"F_{V.labels[i]} and F_{V.labels[j]} meet in a full circle"
        )
    if len(comps) > max(V.n - 2, 0):
        raise InternalInvariantViolation(
            f"{len(comps)} components on C_{V.labels[i]}{V.labels[j]}, more than n-2"
        )
    return circle, comps


def facet_components(p, q, V: Configuration) -> AngularIntervalSet:
    """Arcs of ``C_pq`` where the facets ``F_p`` and ``F_q`` meet."""
    i, j = V.index(p), V.index(q)
    if i == j:
        raise ValueError("need two distinct generators")
    if i > j:
        i, j = j, i
    return _pair_components(V, i, j)[1]


# ----------------------------------------------------------------------------
# Assembly helpers


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _gauss_newton(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d = x - centers
    nd = np.linalg.norm(d, axis=1)
    J = d / nd[:, None]
    r = nd - 1.0
    step, *_ = np.linalg.lstsq(J, r, rcond=None)
    return x - step


def _generators_at(V: Configuration, x: np.ndarray) -> frozenset:
    d = np.linalg.norm(V.points - x, axis=1)
    return frozenset(V.labels[k] for k in np.flatnonzero(np.abs(d - 1.0) <= V.tol.eq_dist))


def build_face_complex(V: Configuration, essentiality: Optional[EssentialityReport] = None) -> FaceComplex:
    """Compute vertices, edges and facets of ``B(V)``.

    Raises NotTight for configurations with inessential points and
    ToleranceConflict when the tolerance bands give contradictory vertex
    classifications.
    """
    tol = V.tol
    n = V.n
    if n < 3:
        raise ValueError("the face complex needs at least three points")
    rep = essentiality if essentiality is not None else essential_points(V)
    if rep.inessential:
        raise NotTight(f"inessential points: {sorted(rep.inessential)}")
    P, L = V.points, V.labels

    # (1) arcs where pairs of facets meet
    pairs = {}
    for i, j in combinations(range(n), 2):
        if V.distances[i, j] >= 2.0 - tol.eq_dist:
            continue
        circle, comps = _pair_components(V, i, j)
        if not comps.is_empty:
            pairs[(i, j)] = (circle, comps)

    # (2) candidate principal vertices from arc ends and isolated points
    cand_pos, cand_pair = [], []
    cand_ref = []  # (pair, component index, 0 start / 1 end)
    for key, (circle, comps) in pairs.items():
        for ci, iv in enumerate(comps.intervals):
            ends = (iv.start,) if iv.is_point else (iv.start, iv.end)
            for side, th in enumerate(ends):
                cand_pos.append(circle.point(th))
                cand_pair.append(key)
                cand_ref.append((key, ci, side))
    vertices: list[Vertex] = []
    ref_to_vertex = {}
    if cand_pos:
        cp = np.array(cand_pos)
        uf = _UnionFind(len(cp))
        for a, b in cKDTree(cp).query_pairs(tol.vertex_merge):
            uf.union(a, b)
        clusters: dict[int, list[int]] = {}
        for k in range(len(cp)):
            clusters.setdefault(uf.find(k), []).append(k)
        for root in sorted(clusters):
            members = clusters[root]
            gens0 = sorted({g for k in members for g in cand_pair[k]})
            x = cp[members].mean(axis=0)
            x = _gauss_newton(x, P[gens0])
            gens = _generators_at(V, x)
            if not {L[g] for g in gens0} <= gens:
                raise ToleranceConflict(
                    f"vertex near {np.round(x, 6)} lost generators after merging"
                )
            if len(gens) < 3:
                raise ToleranceConflict(
                    f"arc endpoint near {np.round(x, 6)} lies on only {len(gens)} facets"
                )
            vid = len(vertices)
            vertices.append(Vertex(vid, x, PRINCIPAL, gens, V.match_label(x)))
            for k in members:
                ref_to_vertex[cand_ref[k]] = vid
    principal_pos = np.array([x.position for x in vertices]) if vertices else np.zeros((0, 3))

    # (3) dangling vertices: points of V on exactly two facets
    for i in range(n):
        d = V.distances[i]
        near = np.flatnonzero(np.abs(d - 1.0) <= tol.eq_dist)
        if len(near) != 2 or not in_ball_set(V, P[i]):
            continue
        if len(principal_pos) and np.min(np.linalg.norm(principal_pos - P[i], axis=1)) <= tol.vertex_merge:
            raise ToleranceConflict(f"point {L[i]} is both dangling and principal")
        key = (int(near[0]), int(near[1]))
        if key not in pairs:
            raise ToleranceConflict(f"point {L[i]} lies on no arc of C_{L[key[0]]}{L[key[1]]}")
        circle, comps = pairs[key]
        th = circle.angle_of(P[i])
        inside = [iv for iv in comps.intervals if iv.contains(th, tol.angle_eps)]
        if not inside:
            raise ToleranceConflict(f"point {L[i]} is on two facets but off their common arcs")
        iv = inside[0]
        if iv.is_point or not iv.contains_interior(th, tol.angle_eps):
            raise ToleranceConflict(f"point {L[i]} sits at an arc endpoint")
        gens = frozenset((L[key[0]], L[key[1]]))
        vertices.append(Vertex(len(vertices), P[i].copy(), DANGLING, gens, L[i]))

    # (4) edges: split each arc at the vertices strictly inside it
    on_pair: dict[tuple, list[int]] = {}
    for x in vertices:
        idx = sorted(V.index(g) for g in x.incident_generators)
        for a, b in combinations(idx, 2):
            on_pair.setdefault((a, b), []).append(x.id)
    edges: list[Edge] = []
    for key, (circle, comps) in pairs.items():
        gp = (L[key[0]], L[key[1]])
        for ci, iv in enumerate(comps.intervals):
            if iv.is_point:
                continue
            v0 = ref_to_vertex[(key, ci, 0)]
            v1 = ref_to_vertex[(key, ci, 1)]
            length = iv.length
            inner = []
            for vid in on_pair.get(key, []):
                if vid in (v0, v1):
                    continue
                off = iv.offset(circle.angle_of(vertices[vid].position))
                guard = max(tol.angle_eps, tol.vertex_merge / circle.radius)
                if guard < off < length - guard:
                    inner.append((off, vid))
            inner.sort()
            chain = [(0.0, v0)] + inner + [(length, v1)]
            for (oa, va), (ob, vb) in zip(chain[:-1], chain[1:]):
                seg = make_interval(iv.start + oa, ob - oa)
                edges.append(
                    Edge(
                        id=len(edges),
                        circle=circle,
                        generator_pair=gp,
                        interval=seg,
                        endpoints=(va, vb),
                        is_short=arc_is_short(seg.length, tol.angle_eps),
                        hedge=ci,
                    )
                )

    # (5) facet circuits
    facets = {}
    by_gen: dict[int, list[int]] = {l: [] for l in L}
    for e in edges:
        by_gen[e.generator_pair[0]].append(e.id)
        by_gen[e.generator_pair[1]].append(e.id)
    for lab in L:
        eids = by_gen[lab]
        if len(eids) < 2:
            raise InternalInvariantViolation(f"facet F_{lab} has {len(eids)} boundary edges")
        facets[lab] = _facet_circuit(V, lab, eids, edges, rep.witnesses[lab])

    FC = FaceComplex(V, tuple(vertices), tuple(edges), facets, components={
        (L[i], L[j]): comps for (i, j), (_, comps) in pairs.items()
    }, essentiality=rep)
    _assert_invariants(FC)
    return FC


def _facet_circuit(V, lab, eids, edges, witness) -> Facet:
    p = V.point(lab)
    axis = unit(witness - p)
    u, w = _frame_for_normal(axis)

    def around(x):
        d = x - p
        return canon_angle(np.arctan2(d @ w, d @ u))

    eids = sorted(eids, key=lambda k: around(edges[k].midpoint))
    directed = []
    for k in eids:
        e = edges[k]
        # increasing circle angle is counterclockwise for the first generator
        directed.append(e.endpoints if e.generator_pair[0] == lab else e.endpoints[::-1])
    for a in range(len(directed)):
        if directed[a][1] != directed[(a + 1) % len(directed)][0]:
            raise ToleranceConflict(f"boundary of F_{lab} does not close up")
    verts = tuple(t for t, _ in directed)
    if len(set(verts)) != len(verts):
        raise NonGenericUnsupported(f"facet F_{lab} visits a vertex more than once")
    return Facet(lab, verts, tuple(eids), axis, len(verts) == 2)


def _assert_invariants(FC: FaceComplex):
    chi = FC.v - FC.e + FC.f
    if chi != 2:
        raise InternalInvariantViolation(f"Euler characteristic {chi} != 2 for {FC}")
    for x in FC.vertices:
        for g in x.incident_generators:
            if x.id not in FC.facets[g].vertices:
                raise InternalInvariantViolation(f"vertex {x.id} missing from F_{g}")
        seen = sum(x.id in F.vertices for F in FC.facets.values())
        if seen != len(x.incident_generators):
            raise InternalInvariantViolation(f"vertex {x.id} on {seen} facets")
    for F in FC.facets.values():
        if len(F.vertices) < 2:
            raise InternalInvariantViolation(f"facet F_{F.generator} has fewer than two vertices")


# ----------------------------------------------------------------------------
# Structural checks


def euler_characteristic(FC: FaceComplex) -> int:
    return FC.v - FC.e + FC.f


def multigraph_two_connected(G: nx.MultiGraph) -> bool:
    """2-connectivity counting parallel edges (two vertices need two edges)."""
    if G.number_of_nodes() < 2 or not nx.is_connected(G):
        return False
    if G.number_of_nodes() == 2:
        return G.number_of_edges() >= 2
    return not any(True for _ in nx.articulation_points(nx.Graph(G)))


def is_two_connected(FC: FaceComplex) -> bool:
    return multigraph_two_connected(FC.skeleton())


def arc_is_short(length: float, angle_eps: float = DEFAULT_TOLERANCE.angle_eps) -> bool:
    """Strictly shorter than a half circle, with a guard band below pi."""
    return bool(length < np.pi - angle_eps)


def edge_is_short(FC: FaceComplex, eid: int) -> bool:
    """Whether the edge is shorter than a half circle.

    Also checks the plane test: for a facet F_x with at least three
    vertices, a short edge and the other generator lie on opposite sides of
    the plane through x and the edge's endpoints.
    """
    e = FC.edges[eid]
    short = e.is_short
    V = FC.config
    a = FC.vertices[e.endpoints[0]].position
    b = FC.vertices[e.endpoints[1]].position
    mid = e.midpoint
    for xl, yl in (e.generator_pair, e.generator_pair[::-1]):
        if len(FC.facets[xl].vertices) < 3:
            continue
        x, y = V.point(xl), V.point(yl)
        nH = np.cross(a - x, b - x)
        if np.linalg.norm(nH) < 1e-9:
            continue
        nH = nH / np.linalg.norm(nH)
        se, sy = float((mid - x) @ nH), float((y - x) @ nH)
        if min(abs(se), abs(sy)) <= 1e-9:
            continue
        if (se * sy < 0) != short:
            raise ToleranceConflict(f"edge {eid}: arc length and plane test disagree")
        break
    return short


@dataclass(frozen=True)
class ValenceReport:
    rows: dict  # vertex id -> (valence, number of generators at distance 1)

    @property
    def ok(self) -> bool:
        return all(a == b for a, b in self.rows.values())

    @property
    def failures(self) -> list:
        return [vid for vid, (a, b) in self.rows.items() if a != b]


def vertex_valence_check(FC: FaceComplex) -> ValenceReport:
    """Skeleton valence against the count of points of V at distance 1."""
    rows = {}
    for x in FC.vertices:
        d = np.linalg.norm(FC.config.points - x.position, axis=1)
        at_one = int(np.sum(np.abs(d - 1.0) <= FC.config.tol.eq_dist))
        rows[x.id] = (FC.valence(x.id), at_one)
    return ValenceReport(rows)
