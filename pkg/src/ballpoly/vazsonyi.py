"""Diameter graphs and extremality.

In 3-space a configuration of n points realizes its diameter at most
``2n - 2`` times.  Extremal configurations attain the bound; they are
exactly the tight configurations whose points are all vertices of their
ball polytope, and this module checks both descriptions against each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import networkx as nx
import numpy as np

from .errors import (
    GhsCrossCheckFailure,
    InternalInvariantViolation,
    InvalidSpec,
    NotExtremalInput,
    TooLarge,
)
from .faces import FaceComplex, build_face_complex
from .hull import Configuration, essential_points


@dataclass(frozen=True)
class DiameterGraph:
    labels: tuple
    edges: tuple  # sorted label pairs
    diam: float
    spectral_gap: float  # diam minus the largest non-diameter distance

    @property
    def e(self) -> int:
        return len(self.edges)

    def degrees(self) -> dict:
        deg = {l: 0 for l in self.labels}
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def to_networkx(self) -> nx.Graph:
        G = nx.Graph()
        G.add_nodes_from(self.labels)
        G.add_edges_from(self.edges)
        return G


def diameter_graph(V: Configuration) -> DiameterGraph:
    """Pairs realizing the diameter, within ``eq_dist * (1 + diam)``."""
    if V.n < 2:
        raise InvalidSpec("a diameter graph needs at least two points")
    D = V.distances
    iu, ju = np.triu_indices(V.n, 1)
    d = D[iu, ju]
    diam = float(d.max())
    band = V.tol.eq_dist * (1.0 + diam)
    hit = d >= diam - band
    edges = tuple(sorted((V.labels[i], V.labels[j]) for i, j in zip(iu[hit], ju[hit])))
    rest = d[~hit]
    gap = float(diam - rest.max()) if rest.size else diam
    return DiameterGraph(V.labels, edges, diam, gap)


@dataclass
class ExtremalityVerdict:
    n: int
    e_count: int
    bound: int
    is_extremal: bool
    is_critical: bool
    ghs_cross_check: bool
    details: dict = field(default_factory=dict)
    face_complex: Optional[FaceComplex] = field(default=None, repr=False)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "e": self.e_count,
            "bound": self.bound,
            "extremal": self.is_extremal,
            "critical": self.is_critical,
            "ghs_cross_check": self.ghs_cross_check,
            "details": self.details,
        }


def vertex_set_criterion(V: Configuration):
    """Tightness and ``V == vert B(V)``, for V scaled to diameter 1.

    Returns ``(holds, tight, face_complex_or_None)``.
    """
    rep = essential_points(V)
    if rep.inessential:
        return False, False, None
    FC = build_face_complex(V, rep)
    found = [x.label for x in FC.vertices]
    same = None not in found and sorted(found) == sorted(V.labels)
    return bool(same), True, FC


def check_extremal(V: Configuration, cross_check: bool = True) -> ExtremalityVerdict:
    """Decide extremality by counting diameters, and cross-check it.

    The cross-check builds the face complex of the rescaled configuration
    and compares its vertex set with V.  Disagreement raises
    GhsCrossCheckFailure.
    """
    if V.n < 4:
        raise InvalidSpec("extremality is defined for at least four points")
    scale = 1.0 / V.diam
    Vs = V.scaled(scale)
    G = diameter_graph(Vs)
    bound = 2 * V.n - 2
    ext = G.e == bound
    deg = G.degrees()
    crit = ext and min(deg.values()) >= 3
    details = {
        "scale": scale,
        "spectral_gap": G.spectral_gap,
        "valences": {str(k): v for k, v in sorted(deg.items())},
    }
    agree = True
    FC = None
    if cross_check:
        holds, tight, FC = vertex_set_criterion(Vs)
        details["tight"] = tight
        details["vertex_set_equal"] = holds
        agree = holds == ext
        if not agree:
            raise GhsCrossCheckFailure(
                f"diameter count says extremal={ext} (e={G.e}, 2n-2={bound}) but "
                f"tight={tight}, V == vert B(V) is {holds}"
            )
    return ExtremalityVerdict(V.n, G.e, bound, ext, crit, agree, details, FC)


def _peel(labels, edges, order: str):
    alive = set(labels)
    adj = {l: set() for l in labels}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    while True:
        deg = {l: len(adj[l] & alive) for l in alive}
        low = [l for l, d in deg.items() if d <= 1]
        if low:
            raise NotExtremalInput(f"point {min(low)} has valence {deg[min(low)]}")
        two = sorted(l for l, d in deg.items() if d == 2)
        if not two:
            return frozenset(alive)
        alive.discard(two[0] if order == "min" else two[-1])


def critical_core(V: Configuration) -> Configuration:
    """Strip 2-valent points until every valence is at least 3.

    The result is the unique maximal critical subconfiguration; two removal
    orders are run and must agree.
    """
    G = diameter_graph(V)
    if G.e != 2 * V.n - 2:
        raise NotExtremalInput(f"e = {G.e}, expected {2 * V.n - 2}")
    a = _peel(V.labels, G.edges, "min")
    b = _peel(V.labels, G.edges, "max")
    if a != b:
        raise InternalInvariantViolation("critical core depends on removal order")
    return V.subset(sorted(a))


def no_adjacent_two_valent(V: Configuration) -> bool:
    G = diameter_graph(V)
    deg = G.degrees()
    return not any(deg[a] == 2 and deg[b] == 2 for a, b in G.edges)


def is_extremal_count(V: Configuration) -> bool:
    return V.n >= 4 and diameter_graph(V).e == 2 * V.n - 2


def is_strongly_critical(V: Configuration, max_n: int = 12) -> bool:
    """Extremal with no extremal proper subset (brute force over subsets)."""
    if V.n > max_n:
        raise TooLarge(f"subset search limited to {max_n} points")
    if not is_extremal_count(V):
        return False
    for k in range(4, V.n):
        for sub in combinations(V.labels, k):
            if is_extremal_count(V.subset(sub)):
                return False
    return True
