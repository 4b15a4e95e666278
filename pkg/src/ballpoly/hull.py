"""Configurations, ball sets, essential points and spindles.

A :class:`Configuration` is a labeled finite point set.  Its ball set
``B(V)`` is the intersection of the closed unit balls centered at its
points.  A point is essential when dropping it would enlarge the ball set;
equivalently some point of its unit sphere is strictly inside every other
ball.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import minimize, nnls
from scipy.spatial.distance import pdist, squareform

from .errors import DuplicatePoints, EmptyInput, NotFullDimensional, NotSeparable
from .geometry import (
    DEFAULT_TOLERANCE,
    Ball,
    Tolerance,
    as_point,
    circle_distance_extremes,
    circumball,
    intersection_circle,
    unit,
)


@dataclass(frozen=True, eq=False)
class Configuration:
    """Labeled point set with a classification tolerance.

    ``meta`` carries construction bookkeeping (family name, manifests) and
    takes no part in equality.
    """

    points: np.ndarray
    labels: tuple = None
    tol: Tolerance = DEFAULT_TOLERANCE
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.size == 0:
            raise EmptyInput("configuration needs at least one point")
        pts = pts.reshape(-1, 3)
        if not np.all(np.isfinite(pts)):
            raise ValueError("non-finite coordinates in configuration")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        labels = tuple(range(len(pts))) if self.labels is None else tuple(int(l) for l in self.labels)
        if len(labels) != len(pts) or len(set(labels)) != len(labels):
            raise ValueError("labels must be unique, one per point")
        object.__setattr__(self, "labels", labels)
        if len(pts) > 1:
            D = self.distances
            iu = np.triu_indices(len(pts), 1)
            k = int(np.argmin(D[iu]))
            if D[iu][k] <= self.tol.eq_dist:
                i, j = iu[0][k], iu[1][k]
                raise DuplicatePoints(
                    f"points {labels[i]} and {labels[j]} are {D[i, j]:.3e} apart"
                )

    # -- basic access --------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self):
        return self.n

    @cached_property
    def _index(self) -> dict:
        return {l: i for i, l in enumerate(self.labels)}

    def index(self, label) -> int:
        return self._index[label]

    def point(self, label) -> np.ndarray:
        return self.points[self._index[label]]

    @cached_property
    def distances(self) -> np.ndarray:
        if len(self.points) == 1:
            return np.zeros((1, 1))
        return squareform(pdist(self.points))

    def dist(self, a, b) -> float:
        return float(self.distances[self._index[a], self._index[b]])

    @property
    def diam(self) -> float:
        return float(self.distances.max())

    @cached_property
    def circumball(self) -> Ball:
        return circumball(self.points)

    @property
    def circumradius(self) -> float:
        return self.circumball.radius

    # -- derived configurations ----------------------------------------------
    def subset(self, labels: Sequence) -> "Configuration":
        keep = sorted(self._index[l] for l in labels)
        return Configuration(self.points[keep], [self.labels[i] for i in keep], self.tol)

    def without(self, *labels) -> "Configuration":
        drop = set(labels)
        return self.subset([l for l in self.labels if l not in drop])

    def scaled(self, factor: float) -> "Configuration":
        return Configuration(self.points * factor, self.labels, self.tol, dict(self.meta))

    def with_tolerance(self, tol: Tolerance) -> "Configuration":
        return Configuration(self.points, self.labels, tol, dict(self.meta))

    def with_meta(self, **meta) -> "Configuration":
        m = dict(self.meta)
        m.update(meta)
        return Configuration(self.points, self.labels, self.tol, m)

    def match_label(self, x, radius: float | None = None):
        """Label of the point within ``radius`` (default vertex_merge) of x, or None."""
        radius = self.tol.vertex_merge if radius is None else radius
        d = np.linalg.norm(self.points - as_point(x), axis=1)
        i = int(np.argmin(d))
        return self.labels[i] if d[i] <= radius else None

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return (
            self.labels == other.labels
            and self.tol == other.tol
            and np.array_equal(self.points, other.points)
        )

    def __hash__(self):
        return hash((self.labels, self.points.tobytes(), self.tol))

    def __repr__(self):
        return f"Configuration(n={self.n}, diam={self.diam:.6g})"


# ----------------------------------------------------------------------------
# Ball set membership


def in_ball_set(V: Configuration, x) -> bool:
    d = np.linalg.norm(V.points - as_point(x), axis=1)
    return bool(d.max() <= 1.0 + V.tol.eq_dist)


def ball_set_margin(V: Configuration, x) -> float:
    """``1 - max |x - v|``; positive strictly inside B(V)."""
    return float(1.0 - np.linalg.norm(V.points - as_point(x), axis=1).max())


# ----------------------------------------------------------------------------
# Essential points


@dataclass(frozen=True)
class EssentialityReport:
    essential: frozenset
    inessential: frozenset
    witnesses: dict
    margins: dict
    certified: frozenset = frozenset()

    @property
    def is_tight(self) -> bool:
        return not self.inessential


def _sphere_margin(v: np.ndarray, others: np.ndarray, x: np.ndarray) -> float:
    if len(others) == 0:
        return 1.0
    return float(1.0 - np.linalg.norm(others - x, axis=1).max())


def best_witness(v, others) -> tuple[np.ndarray, float]:
    """Point of S(v) as deep as possible inside all balls B(w), w in others.

    Returns the point and its margin ``min_w (1 - |x - w|)``.

    On the sphere ``x = v + u`` the condition ``|x - w| < 1`` is the
    half-space condition ``<u, w - v> > |w - v|^2 / 2``.  Maximizing the
    smallest slack over the unit ball of u is a convex problem whose optimum
    has the same sign as the margin on the sphere.
    """
    v = as_point(v)
    others = np.asarray(others, dtype=float).reshape(-1, 3)
    if len(others) == 0:
        x = v + np.array([1.0, 0.0, 0.0])
        return x, 1.0
    d = others - v
    c = 0.5 * np.sum(d * d, axis=1)

    # the others pull the witness towards themselves
    if np.linalg.norm(d.mean(axis=0)) > 1e-12:
        starts = [unit(d.mean(axis=0))]
    else:
        starts = [np.array([1.0, 0.0, 0.0])]
    # lattice directions as a fallback
    lattice = [
        unit(np.array([i, j, k], dtype=float))
        for i in (-1, 0, 1)
        for j in (-1, 0, 1)
        for k in (-1, 0, 1)
        if (i, j, k) != (0, 0, 0)
    ]

    def solve(u0):
        t0 = float(np.min(d @ u0 - c))
        z0 = np.concatenate([u0 * 0.999, [t0 - 1e-3]])
        cons = [
            {
                "type": "ineq",
                "fun": lambda z: d @ z[:3] - c - z[3],
                "jac": lambda z: np.hstack([d, -np.ones((len(d), 1))]),
            },
            {
                "type": "ineq",
                "fun": lambda z: np.array([1.0 - z[:3] @ z[:3]]),
                "jac": lambda z: np.concatenate([-2.0 * z[:3], [0.0]])[None, :],
            },
        ]
        res = minimize(
            lambda z: -z[3],
            z0,
            jac=lambda z: np.array([0.0, 0.0, 0.0, -1.0]),
            constraints=cons,
            method="SLSQP",
            options={"ftol": 1e-15, "maxiter": 500},
        )
        u = res.x[:3]
        nu = np.linalg.norm(u)
        if nu < 1e-12:
            return None, -np.inf
        x = v + u / nu
        return x, _sphere_margin(v, others, x)

    best_x, best_m = None, -np.inf
    for u0 in starts:
        x, m = solve(u0)
        if m > best_m:
            best_x, best_m = x, m
    if best_m <= 0:
        # the convex solve should not miss, but lattice starts are cheap insurance
        for u0 in lattice:
            x = v + u0
            m = _sphere_margin(v, others, x)
            if m > best_m:
                best_x, best_m = x, m
            if m > 0:
                x2, m2 = solve(u0)
                if m2 > best_m:
                    best_x, best_m = x2, m2
    return best_x, float(best_m)


def _diameter_certificate(V: Configuration, i: int):
    """Witness from two diameters through point i, when diam V is 1."""
    D = V.distances
    tol = V.tol.eq_dist
    if abs(V.diam - 1.0) > tol:
        return None
    far = np.flatnonzero(np.abs(D[i] - 1.0) <= tol)
    if len(far) < 2:
        return None
    v = V.points[i]
    a, b = V.points[far[0]], V.points[far[1]]
    x = v + unit(0.5 * (a + b) - v)
    return x


def essential_points(V: Configuration, use_certificate: bool = True) -> EssentialityReport:
    """Split V into essential and inessential points, with witnesses.

    ``margins`` holds ``min_w (1 - |x - w|)`` at the point x returned by the
    witness search.  Its sign decides essentiality; for inessential points
    it is not the optimum of the margin over the sphere.

    When ``diam V = 1`` a point incident with two diameters is essential
    without a search; a witness is still computed for the report.
    """
    tol = V.tol
    if V.n > 1 and V.circumradius >= 1.0 - tol.eq_dist:
        raise NotFullDimensional(f"circumradius {V.circumradius:.12g} is not below 1")
    essential, inessential, certified = set(), set(), set()
    witnesses, margins = {}, {}
    for i, lab in enumerate(V.labels):
        v = V.points[i]
        others = np.delete(V.points, i, axis=0)
        x, m = None, -np.inf
        if use_certificate:
            xc = _diameter_certificate(V, i)
            if xc is not None:
                certified.add(lab)
                x, m = xc, _sphere_margin(v, others, xc)
        if m <= tol.eq_dist:
            x2, m2 = best_witness(v, others)
            if m2 > m:
                x, m = x2, m2
        margins[lab] = m
        if m > tol.eq_dist or lab in certified:
            essential.add(lab)
            witnesses[lab] = x
        else:
            inessential.add(lab)
    return EssentialityReport(
        frozenset(essential), frozenset(inessential), witnesses, margins, frozenset(certified)
    )


def tighten(V: Configuration) -> Configuration:
    """Drop inessential points; the ball set is unchanged."""
    cur = V
    while True:
        rep = essential_points(cur)
        if not rep.inessential:
            return cur
        cur = cur.subset([l for l in cur.labels if l in rep.essential])


# ----------------------------------------------------------------------------
# Separation and spindles


def _nearest_in_hull(S: np.ndarray, z: np.ndarray) -> np.ndarray:
    m = len(S)
    if m == 1:
        return S[0].copy()
    # penalized nonnegative least squares gives a good start for the exact QP
    M = 1e4
    A = np.vstack([S.T, M * np.ones((1, m))])
    lam, _ = nnls(A, np.concatenate([z, [M]]))
    lam = np.clip(lam, 0, None)
    lam = lam / lam.sum() if lam.sum() > 0 else np.full(m, 1.0 / m)
    res = minimize(
        lambda l: float(np.sum((S.T @ l - z) ** 2)),
        lam,
        jac=lambda l: 2.0 * S @ (S.T @ l - z),
        bounds=[(0.0, 1.0)] * m,
        constraints=[{"type": "eq", "fun": lambda l: l.sum() - 1.0, "jac": lambda l: np.ones((1, m))}],
        method="SLSQP",
        options={"ftol": 1e-16, "maxiter": 500},
    )
    lam = np.clip(res.x, 0, None)
    lam /= lam.sum()
    return S.T @ lam


def separating_ball(S, z, tol: Tolerance = DEFAULT_TOLERANCE) -> Ball:
    """Unit ball containing S and missing z.

    The center is ``a + u`` where a is the point of conv S nearest z and u
    the unit vector from z towards a.  This is guaranteed to work when the
    nearest point of the ball hull of S is a; otherwise the check fails and
    NotSeparable is raised.
    """
    S = np.asarray(S, dtype=float).reshape(-1, 3)
    z = as_point(z)
    if len(S) == 0:
        raise EmptyInput("separating_ball needs a nonempty set")
    a = _nearest_in_hull(S, z)
    gap = float(np.linalg.norm(a - z))
    if gap <= tol.eq_dist:
        raise NotSeparable("point lies in the convex hull")
    center = a + (a - z) / gap
    if np.linalg.norm(S - center, axis=1).max() > 1.0 + tol.eq_dist:
        raise NotSeparable("nearest-point ball does not contain the set")
    if np.linalg.norm(center - z) <= 1.0:
        raise NotSeparable("nearest-point ball does not miss the point")
    return Ball(center, 1.0)


def spindle_max_distance(a, b, x) -> float:
    """Largest distance from x to a point of the lens B(a) and B(b)."""
    a, b, x = as_point(a), as_point(b), as_point(x)
    cands = []
    for p, q in ((a, b), (b, a)):
        d = x - p
        nd = np.linalg.norm(d)
        far = p - d / nd if nd > 0 else p + np.array([1.0, 0.0, 0.0])
        if np.linalg.norm(far - q) <= 1.0:
            cands.append(far)
    C = intersection_circle(a, b, Tolerance(eq_dist=1e-15, vertex_merge=1e-14))
    try:
        _, tmax = circle_distance_extremes(C, x, Tolerance(eq_dist=1e-15, vertex_merge=1e-14))
    except Exception:
        tmax = 0.0
    cands.append(C.point(tmax))
    return float(max(np.linalg.norm(x - c) for c in cands))


def spindle_contains(a, b, x, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Membership in the spindle of a and b (the ball hull of the pair)."""
    a, b, x = as_point(a), as_point(b), as_point(x)
    ab = float(np.linalg.norm(a - b))
    if ab >= 2.0:
        return bool(np.linalg.norm(x - 0.5 * (a + b)) <= 0.5 * ab + tol.eq_dist)
    if ab <= 1e-15:
        return bool(np.linalg.norm(x - a) <= tol.eq_dist)
    return spindle_max_distance(a, b, x) <= 1.0 + tol.eq_dist
