"""Self-dualities of face complexes.

For an extremal configuration every point x of V is a vertex and also the
generator of the facet F_x.  Sending x to F_x, and each edge with endpoints
{a, b} on the circle C_xy to the edge with endpoints {x, y} on C_ab, is an
order reversing involution of the face poset.  Its induced map on the
barycentric (flag) subdivision fixes no cell.

Faces of a complex are addressed by node keys ``('v', id)``, ``('e', id)``
and ``('f', id)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Mapping, Optional

import networkx as nx
import numpy as np

from .errors import (
    BarycenterFallback,
    DualityFailure,
    InvalidOrder,
    NotExtremalInput,
    ToleranceConflict,
    TooLarge,
)
from .faces import FaceComplex
from .geometry import DEFAULT_TOLERANCE, Tolerance, as_point, intersection_circle, make_interval, unit
from .hull import ball_set_margin
from .vazsonyi import diameter_graph

GREATER = "greater_than_1"
LESS = "less_than_1"
EQUAL = "equal_1"


# ----------------------------------------------------------------------------
# Abstract complexes


@dataclass(frozen=True, eq=False)
class AbstractComplex:
    """Vertices, edges and facets with incidences and no geometry.

    ``edges`` maps an edge name to ``(endpoints, facets)``, each a pair.
    """

    vertices: tuple
    facets: tuple
    edges: Mapping

    def __post_init__(self):
        vs, fs = set(self.vertices), set(self.facets)
        for name, (ends, fcs) in self.edges.items():
            if len(ends) != 2 or len(fcs) != 2 or fcs[0] == fcs[1]:
                raise ValueError(f"edge {name!r} needs two endpoints and two facets")
            if not set(ends) <= vs or not set(fcs) <= fs:
                raise ValueError(f"edge {name!r} refers to unknown faces")

    def edge_vertices(self, e):
        return self.edges[e][0]

    def edge_facets(self, e):
        return self.edges[e][1]

    def facet_edges(self, F) -> list:
        return [e for e, (_, fc) in self.edges.items() if F in fc]

    def vertex_edges(self, x) -> list:
        return [e for e, (ends, _) in self.edges.items() if x in ends]

    def facet_vertices(self, F) -> frozenset:
        return frozenset(v for e in self.facet_edges(F) for v in self.edges[e][0])

    def vertex_facets(self, x) -> frozenset:
        return frozenset(F for e in self.vertex_edges(x) for F in self.edges[e][1])

    def valence(self, x) -> int:
        return sum((a == x) + (b == x) for (a, b), _ in self.edges.values())

    def facet_size(self, F) -> int:
        return len(self.facet_edges(F))

    @property
    def counts(self) -> tuple:
        return len(self.vertices), len(self.edges), len(self.facets)

    def euler(self) -> int:
        v, e, f = self.counts
        return v - e + f

    def node_keys(self) -> list:
        return (
            [("v", x) for x in self.vertices]
            + [("e", e) for e in self.edges]
            + [("f", F) for F in self.facets]
        )

    def hasse_graph(self) -> nx.Graph:
        G = nx.Graph()
        for x in self.vertices:
            G.add_node(("v", x), rank=0)
        for F in self.facets:
            G.add_node(("f", F), rank=2)
        for e, (ends, fcs) in self.edges.items():
            G.add_node(("e", e), rank=1)
            for x in ends:
                G.add_edge(("v", x), ("e", e))
            for F in fcs:
                G.add_edge(("e", e), ("f", F))
        return G

    def facet_is_circuit(self, F) -> bool:
        G = nx.MultiGraph()
        for e in self.facet_edges(F):
            G.add_edge(*self.edges[e][0])
        return (
            G.number_of_edges() >= 2
            and nx.is_connected(G)
            and all(d == 2 for _, d in G.degree())
        )


def abstract_from_face_complex(FC: FaceComplex) -> AbstractComplex:
    edges = {e.id: (tuple(e.endpoints), tuple(e.generator_pair)) for e in FC.edges}
    return AbstractComplex(
        tuple(x.id for x in FC.vertices), tuple(sorted(FC.facets)), edges
    )


def is_poset_isomorphic(A: AbstractComplex, B: AbstractComplex) -> bool:
    """Isomorphism of the face posets (rank-preserving Hasse diagrams)."""
    if A.counts != B.counts:
        return False
    return nx.is_isomorphic(
        A.hasse_graph(), B.hasse_graph(), node_match=lambda u, v: u["rank"] == v["rank"]
    )


def apexed_prism_complex(n: int) -> AbstractComplex:
    """Prism over an n-gon with a pyramid glued onto its top.

    Vertices q, a1..an (bottom), b1..bn (top); facets Q (bottom), Bi (side
    quadrilateral a_i a_{i+1} b_{i+1} b_i) and Ai (triangle q b_i b_{i+1}).
    """
    if int(n) != n or n < 3:
        raise InvalidOrder("an apexed prism needs n >= 3")
    n = int(n)
    a = [f"a{i + 1}" for i in range(n)]
    b = [f"b{i + 1}" for i in range(n)]
    A = [f"A{i + 1}" for i in range(n)]
    B = [f"B{i + 1}" for i in range(n)]
    edges = {}
    for i in range(n):
        j = (i + 1) % n
        edges[f"{a[i]}{a[j]}"] = ((a[i], a[j]), ("Q", B[i]))
        edges[f"{a[i]}{b[i]}"] = ((a[i], b[i]), (B[i - 1], B[i]))
        edges[f"{b[i]}{b[j]}"] = ((b[i], b[j]), (B[i], A[i]))
        edges[f"q{b[i]}"] = (("q", b[i]), (A[i - 1], A[i]))
    return AbstractComplex(tuple(["q"] + a + b), tuple(["Q"] + A + B), edges)


# ----------------------------------------------------------------------------
# Self-dualities


@dataclass(frozen=True, eq=False)
class SelfDuality:
    """Involutory self-duality: vertex to facet (inverted on facets) and edge to edge."""

    vertex_to_facet: Mapping
    edge_to_edge: Mapping

    def facet_to_vertex(self) -> dict:
        return {F: x for x, F in self.vertex_to_facet.items()}

    def image(self, key):
        kind, name = key
        if kind == "v":
            return ("f", self.vertex_to_facet[name])
        if kind == "e":
            return ("e", self.edge_to_edge[name])
        return ("v", self._inverse[name])

    @property
    def _inverse(self):
        inv = self.__dict__.get("_inv")
        if inv is None:
            inv = self.facet_to_vertex()
            object.__setattr__(self, "_inv", inv)
        return inv

    def key(self) -> tuple:
        return (
            tuple(sorted(self.vertex_to_facet.items(), key=repr)),
            tuple(sorted(self.edge_to_edge.items(), key=repr)),
        )


def duality_problems(d: SelfDuality, C: AbstractComplex) -> list:
    """List of violated properties (empty when d is an order reversing involution)."""
    out = []
    sigma, tau = d.vertex_to_facet, d.edge_to_edge
    if set(sigma) != set(C.vertices) or set(sigma.values()) != set(C.facets):
        out.append("vertex to facet map is not a bijection")
        return out
    if set(tau) != set(C.edges) or set(tau.values()) != set(C.edges):
        out.append("edge map is not a bijection")
        return out
    if any(tau[tau[e]] != e for e in tau):
        out.append("edge map is not an involution")
    inv = d.facet_to_vertex()
    for e, (ends, fcs) in C.edges.items():
        ends2, fcs2 = C.edges[tau[e]]
        # x in e  =>  phi(e) in phi(x);  e in F  =>  phi(F) in phi(e)
        if {sigma[x] for x in ends} != set(fcs2):
            out.append(f"edge {e!r}: endpoints do not map to the facets of its image")
        if {inv[F] for F in fcs} != set(ends2):
            out.append(f"edge {e!r}: facets do not map to the endpoints of its image")
    return out


def canonical_duality(FC: FaceComplex) -> SelfDuality:
    """The map x -> F_x with edges sent to their dual edges."""
    V = FC.config
    G = diameter_graph(V)
    if V.n < 4 or G.e != 2 * V.n - 2:
        raise NotExtremalInput(f"e = {G.e}, needs 2n-2 = {2 * V.n - 2}")
    labels = [x.label for x in FC.vertices]
    if None in labels or sorted(labels) != sorted(V.labels):
        raise NotExtremalInput("vertices of B(V) differ from V")
    sigma = {x.id: x.label for x in FC.vertices}
    table = {}
    for e in FC.edges:
        k = (frozenset(sigma[v] for v in e.endpoints), frozenset(e.generator_pair))
        if k in table:
            raise DualityFailure(f"edges {table[k]} and {e.id} share endpoints and circle")
        table[k] = e.id
    tau = {}
    for e in FC.edges:
        ends = frozenset(sigma[v] for v in e.endpoints)
        k = (frozenset(e.generator_pair), ends)
        if k not in table:
            raise DualityFailure(f"edge {e.id} has no dual edge")
        tau[e.id] = table[k]
    d = SelfDuality(sigma, tau)
    problems = duality_problems(d, abstract_from_face_complex(FC))
    if problems:
        raise DualityFailure("; ".join(problems[:3]))
    return d


# ----------------------------------------------------------------------------
# Flag complexes


@dataclass(eq=False)
class FlagComplex:
    """Barycentric subdivision: one node per face, one simplex per chain."""

    complex: AbstractComplex
    nodes: dict  # node key -> position (None when abstract)
    simplices: tuple  # frozensets of node keys, all dimensions

    @property
    def triangles(self) -> list:
        return [s for s in self.simplices if len(s) == 3]

    def simplices_of_dim(self, k: int) -> list:
        return [s for s in self.simplices if len(s) == k + 1]


def flag_complex(C: AbstractComplex, positions: Optional[dict] = None) -> FlagComplex:
    nodes = {k: None for k in C.node_keys()}
    if positions:
        nodes.update(positions)
    simp = [frozenset([k]) for k in nodes]
    for e, (ends, fcs) in C.edges.items():
        for x in ends:
            simp.append(frozenset([("v", x), ("e", e)]))
        for F in fcs:
            simp.append(frozenset([("e", e), ("f", F)]))
            for x in ends:
                simp.append(frozenset([("v", x), ("e", e), ("f", F)]))
    for F in C.facets:
        for x in sorted(C.facet_vertices(F), key=repr):
            simp.append(frozenset([("v", x), ("f", F)]))
    return FlagComplex(C, nodes, tuple(simp))


def facet_center(FC: FaceComplex, label) -> np.ndarray:
    """Point z(F) in the relative interior of a facet.

    Normalized mean of the vertex directions seen from the generator; for a
    digon this is the geodesic midpoint of its two vertices.  Falls back to
    the facet's deepest point when the mean misses the relative interior.
    """
    V = FC.config
    F = FC.facets[label]
    p = V.point(label)
    dirs = np.array([unit(FC.vertices[v].position - p) for v in F.vertices])
    others = V.without(label)
    s = dirs.sum(axis=0)
    if np.linalg.norm(s) > 1e-12:
        z = p + unit(s)
        if ball_set_margin(others, z) > V.tol.eq_dist:
            return z
    if FC.essentiality is not None and label in FC.essentiality.witnesses:
        z = FC.essentiality.witnesses[label]
        if ball_set_margin(others, z) > V.tol.eq_dist:
            return z
    raise BarycenterFallback(f"no interior point found for F_{label}")


def barycentric_subdivision(FC: FaceComplex) -> FlagComplex:
    pos = {("v", x.id): x.position for x in FC.vertices}
    pos.update({("e", e.id): e.midpoint for e in FC.edges})
    pos.update({("f", lab): facet_center(FC, lab) for lab in FC.facets})
    return flag_complex(abstract_from_face_complex(FC), pos)


@dataclass(frozen=True)
class FixedPointReport:
    fixed_point_free: bool  # no nonempty cell maps to itself
    vertex_disjoint: bool  # no cell shares a node with its image
    fixed_cells: tuple = ()

    def __bool__(self):
        return self.fixed_point_free


def is_fixed_point_free(d: SelfDuality, K: FlagComplex) -> FixedPointReport:
    fixed, disjoint = [], True
    for s in K.simplices:
        img = frozenset(d.image(k) for k in s)
        if img == s:
            fixed.append(s)
        if disjoint and img & s:
            disjoint = False
    fixed.sort(key=lambda s: (len(s), sorted(map(repr, s))))
    return FixedPointReport(not fixed, disjoint, tuple(fixed))


# ----------------------------------------------------------------------------
# Enumeration


@dataclass(frozen=True)
class ClassifiedDuality:
    duality: SelfDuality
    report: FixedPointReport


def enumerate_self_dualities(C: AbstractComplex, max_faces: int = 30) -> list:
    """All involutory order reversing self-dualities of a small complex."""
    nv, ne, nf = C.counts
    if max(nv, ne, nf) > max_faces:
        raise TooLarge(f"complex has {(nv, ne, nf)} faces, limit {max_faces} per rank")
    if nv != nf:
        return []
    fverts = {F: C.facet_vertices(F) for F in C.facets}
    fsize = {F: C.facet_size(F) for F in C.facets}
    val = {x: C.valence(x) for x in C.vertices}
    order = sorted(C.vertices, key=lambda x: (-val[x], repr(x)))
    sigmas = []

    def assign(k, sigma, used):
        if k == len(order):
            sigmas.append(dict(sigma))
            return
        x = order[k]
        for F in C.facets:
            if F in used or fsize[F] != val[x]:
                continue
            if any((x in fverts[sigma[y]]) != (y in fverts[F]) for y in sigma):
                continue
            sigma[x] = F
            used.add(F)
            assign(k + 1, sigma, used)
            del sigma[x]
            used.discard(F)

    assign(0, {}, set())

    results = []
    edge_names = list(C.edges)
    for sigma in sigmas:
        inv = {F: x for x, F in sigma.items()}
        cands = {}
        for e in edge_names:
            ends, fcs = C.edges[e]
            want_ends = {inv[F] for F in fcs}
            want_fcs = {sigma[x] for x in ends}
            cands[e] = [
                g for g in edge_names
                if set(C.edges[g][0]) == want_ends and set(C.edges[g][1]) == want_fcs
            ]
        if any(not c for c in cands.values()):
            continue
        taus = []

        def extend(i, tau):
            while i < len(edge_names) and edge_names[i] in tau:
                i += 1
            if i == len(edge_names):
                taus.append(dict(tau))
                return
            e = edge_names[i]
            for g in cands[e]:
                if g in tau:
                    continue
                if e not in cands[g]:
                    continue
                tau[e] = g
                tau[g] = e
                extend(i + 1, tau)
                del tau[e]
                tau.pop(g, None)

        extend(0, {})
        for tau in taus:
            d = SelfDuality(dict(sigma), tau)
            if duality_problems(d, C):
                continue
            results.append(d)
    K = flag_complex(C)
    return [ClassifiedDuality(d, is_fixed_point_free(d, K)) for d in results]


# ----------------------------------------------------------------------------
# Dual arcs


@dataclass(frozen=True, eq=False)
class DualArcPair:
    """Four points in equilateral position: each of a, b is at distance 1 from x and y.

    ``short_arc_ab`` is the short arc from a to b on C_xy and
    ``short_arc_xy`` the short arc from x to y on C_ab.
    """

    a: np.ndarray
    b: np.ndarray
    x: np.ndarray
    y: np.ndarray
    tol: Tolerance = DEFAULT_TOLERANCE

    def __post_init__(self):
        for name in "abxy":
            object.__setattr__(self, name, as_point(getattr(self, name)))
        for u in (self.a, self.b):
            for w in (self.x, self.y):
                if abs(np.linalg.norm(u - w) - 1.0) > self.tol.eq_dist:
                    raise ValueError("points are not in equilateral position")
        cxy = intersection_circle(self.x, self.y, self.tol)
        cab = intersection_circle(self.a, self.b, self.tol)
        object.__setattr__(self, "circle_xy", cxy)
        object.__setattr__(self, "circle_ab", cab)
        object.__setattr__(self, "short_arc_ab", _short_arc(cxy, self.a, self.b))
        object.__setattr__(self, "short_arc_xy", _short_arc(cab, self.x, self.y))


def _short_arc(circle, p, q):
    tp, tq = circle.angle_of(p), circle.angle_of(q)
    length = (tq - tp) % (2 * np.pi)
    if length <= np.pi:
        return make_interval(tp, length)
    return make_interval(tq, 2 * np.pi - length)


def _in_short_interior(iv, theta):
    off = np.mod(np.asarray(theta) - iv.start, 2 * np.pi)
    return (off > 0) & (off < iv.length)


def classify_dual_angles(pair: DualArcPair, theta_c, theta_z) -> np.ndarray:
    """Vectorized classification for c = C_xy(theta_c), z = C_ab(theta_z).

    Returns +1 (distance above 1), -1 (below 1) or 0 (exactly 1, at an
    endpoint).  Endpoints are detected by coincidence with a, b, x, y
    within eq_dist.
    """
    tc = np.atleast_1d(np.asarray(theta_c, dtype=float))
    tz = np.atleast_1d(np.asarray(theta_z, dtype=float))
    c = pair.circle_xy.point(tc)
    z = pair.circle_ab.point(tz)
    eq = pair.tol.eq_dist
    c_end = np.minimum(np.linalg.norm(c - pair.a, axis=-1), np.linalg.norm(c - pair.b, axis=-1)) <= eq
    z_end = np.minimum(np.linalg.norm(z - pair.x, axis=-1), np.linalg.norm(z - pair.y, axis=-1)) <= eq
    sc = _in_short_interior(pair.short_arc_ab, tc)
    sz = _in_short_interior(pair.short_arc_xy, tz)
    out = np.where(sc == sz, 1, -1)
    return np.where(c_end | z_end, 0, out)


def dual_arc_distance_classify(pair: DualArcPair, c, z) -> str:
    """Whether |c - z| is above, below or equal to 1, decided from arc membership."""
    c, z = as_point(c), as_point(z)
    eq = pair.tol.eq_dist
    for pt, u, w, nm in ((c, pair.x, pair.y, "c"), (z, pair.a, pair.b, "z")):
        if abs(np.linalg.norm(pt - u) - 1) > 10 * eq or abs(np.linalg.norm(pt - w) - 1) > 10 * eq:
            raise ValueError(f"{nm} is not on its circle")
    s = int(
        classify_dual_angles(pair, pair.circle_xy.angle_of(c), pair.circle_ab.angle_of(z))[0]
    )
    d = float(np.linalg.norm(c - z))
    if (s > 0 and d < 1 - eq) or (s < 0 and d > 1 + eq) or (s == 0 and abs(d - 1) > eq):
        raise ToleranceConflict(f"arc classification {s} contradicts distance {d!r}")
    return {1: GREATER, -1: LESS, 0: EQUAL}[s]
