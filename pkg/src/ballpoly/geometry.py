"""Geometric primitives: balls, sphere-sphere circles and angular intervals.

Angles on a circle are measured in the circle's own ``(frame_u, frame_w)``
basis and canonicalized to ``[0, 2*pi)``.  Intervals run counterclockwise
from ``start`` to ``end`` and may wrap past zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import nnls

from .errors import (
    AxisDegenerate,
    DegenerateCoincident,
    DegenerateEmptyOrPoint,
    EmptyInput,
    NotOnSphere,
    ToleranceConflict,
)

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Tolerance:
    """Classification bands.

    eq_dist      half-width of the band in which two distances count as equal
    vertex_merge radius within which candidate vertices are identified
    angle_eps    angular resolution on circles
    """

    eq_dist: float = 1e-9
    vertex_merge: float = 1e-7
    angle_eps: float = 1e-9

    def __post_init__(self):
        vals = (self.eq_dist, self.vertex_merge, self.angle_eps)
        if not all(np.isfinite(v) for v in vals):
            raise ToleranceConflict("tolerances must be finite")
        if not (0 < self.eq_dist < self.vertex_merge < 1e-3):
            raise ToleranceConflict(
                "need 0 < eq_dist < vertex_merge < 1e-3, got "
                f"eq_dist={self.eq_dist}, vertex_merge={self.vertex_merge}"
            )
        if not self.angle_eps > 0:
            raise ToleranceConflict("angle_eps must be positive")

    def as_dict(self):
        return {
            "eq_dist": self.eq_dist,
            "vertex_merge": self.vertex_merge,
            "angle_eps": self.angle_eps,
        }


DEFAULT_TOLERANCE = Tolerance()


def as_point(p) -> np.ndarray:
    a = np.asarray(p, dtype=float).reshape(3)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"non-finite coordinates: {a}")
    return a


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def canon_angle(theta):
    """Map an angle (or array of angles) into [0, 2*pi)."""
    t = np.mod(theta, TWO_PI)
    # np.mod can return exactly 2*pi for tiny negative inputs
    return np.where(t >= TWO_PI, 0.0, t) if np.ndim(t) else (0.0 if t >= TWO_PI else float(t))


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def contains(self, x, slack: float = 0.0) -> bool:
        return float(np.linalg.norm(as_point(x) - self.center)) <= self.radius + slack


# ----------------------------------------------------------------------------
# Circles


@dataclass(frozen=True, eq=False)
class Circle3:
    """An oriented circle in space with an in-plane orthonormal frame.

    ``(frame_u, frame_w, normal)`` is a right-handed orthonormal basis and
    ``point(theta) = center + radius*(cos(theta)*frame_u + sin(theta)*frame_w)``.
    """

    center: np.ndarray
    radius: float
    normal: np.ndarray
    frame_u: np.ndarray = field(default=None)
    frame_w: np.ndarray = field(default=None)

    def __post_init__(self):
        n = unit(self.normal)
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "center", as_point(self.center))
        if self.frame_u is None or self.frame_w is None:
            u, w = _frame_for_normal(n)
            object.__setattr__(self, "frame_u", u)
            object.__setattr__(self, "frame_w", w)
        if not self.radius > 0:
            raise ValueError("circle radius must be positive")

    def point(self, theta) -> np.ndarray:
        """Point(s) at angle(s) theta.  Array input gives an (m, 3) array."""
        th = np.asarray(theta, dtype=float)
        pts = (
            self.center
            + self.radius * np.cos(th)[..., None] * self.frame_u
            + self.radius * np.sin(th)[..., None] * self.frame_w
        )
        return pts

    def angle_of(self, x) -> float:
        d = as_point(x) - self.center
        return canon_angle(np.arctan2(d @ self.frame_w, d @ self.frame_u))

    def tangent(self, theta) -> np.ndarray:
        return -np.sin(theta) * self.frame_u + np.cos(theta) * self.frame_w


def _frame_for_normal(n: np.ndarray):
    ex = np.array([1.0, 0.0, 0.0])
    u = ex - (ex @ n) * n
    if np.linalg.norm(u) < 1e-6:
        ey = np.array([0.0, 1.0, 0.0])
        u = ey - (ey @ n) * n
    u = unit(u)
    w = np.cross(n, u)
    return u, unit(w)


def intersection_circle(p, q, tol: Tolerance = DEFAULT_TOLERANCE) -> Circle3:
    """Circle of points at distance 1 from both p and q (normal along q - p)."""
    p, q = as_point(p), as_point(q)
    d = q - p
    dist = float(np.linalg.norm(d))
    if dist <= tol.eq_dist:
        raise DegenerateCoincident(f"centers coincide (distance {dist:.3e})")
    if dist >= 2.0 - tol.eq_dist:
        raise DegenerateEmptyOrPoint(f"centers {dist:.12g} apart, no circle")
    r = np.sqrt(1.0 - 0.25 * dist * dist)
    return Circle3(center=0.5 * (p + q), radius=float(r), normal=d / dist)


# ----------------------------------------------------------------------------
# Angular intervals


@dataclass(frozen=True)
class AngularInterval:
    """Closed counterclockwise arc from ``start`` to ``end``.

    A point component has ``start == end``.  The full circle is never an
    AngularInterval; see :attr:`AngularIntervalSet.full_circle`.
    """

    start: float
    end: float

    @property
    def length(self) -> float:
        return float(np.mod(self.end - self.start, TWO_PI))

    @property
    def is_point(self) -> bool:
        return self.start == self.end

    @property
    def midpoint(self) -> float:
        return canon_angle(self.start + 0.5 * self.length)

    def offset(self, theta) -> float:
        """Counterclockwise angular offset of theta from start, in [0, 2*pi)."""
        return canon_angle(theta - self.start)

    def contains(self, theta, eps: float = 0.0) -> bool:
        off = float(np.mod(theta - self.start, TWO_PI))
        return off <= self.length + eps or off >= TWO_PI - eps

    def contains_interior(self, theta, eps: float) -> bool:
        off = float(np.mod(theta - self.start, TWO_PI))
        return eps < off < self.length - eps


def make_interval(start: float, length: float) -> AngularInterval:
    s = canon_angle(start)
    if length <= 0:
        return AngularInterval(s, s)
    return AngularInterval(s, canon_angle(s + length))


@dataclass(frozen=True)
class AngularIntervalSet:
    """Disjoint closed arcs sorted by start, or the whole circle."""

    intervals: tuple = ()
    full_circle: bool = False

    @classmethod
    def full(cls) -> "AngularIntervalSet":
        return cls((), True)

    @classmethod
    def empty(cls) -> "AngularIntervalSet":
        return cls((), False)

    @property
    def is_empty(self) -> bool:
        return not self.full_circle and not self.intervals

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    @property
    def point_components(self):
        return [iv for iv in self.intervals if iv.is_point]

    def contains(self, theta, eps: float = 0.0) -> bool:
        if self.full_circle:
            return True
        return any(iv.contains(theta, eps) for iv in self.intervals)

    def total_length(self) -> float:
        if self.full_circle:
            return TWO_PI
        return sum(iv.length for iv in self.intervals)


def normalize_pieces(
    pieces: Iterable[tuple[float, float]], angle_eps: float
) -> AngularIntervalSet:
    """Merge (start, length) pieces into a canonical interval set.

    Pieces that touch within angle_eps are joined; components shorter than
    angle_eps collapse to a single angle.
    """
    items = sorted((canon_angle(s), max(float(l), 0.0)) for s, l in pieces)
    if not items:
        return AngularIntervalSet.empty()
    merged: list[list[float]] = []
    for s, l in items:
        if l >= TWO_PI - angle_eps:
            return AngularIntervalSet.full()
        if merged and s <= merged[-1][1] + angle_eps:
            merged[-1][1] = max(merged[-1][1], s + l)
        else:
            merged.append([s, s + l])
    # the last piece may run past 2*pi into the first ones
    while len(merged) > 1 and merged[-1][1] - TWO_PI >= merged[0][0] - angle_eps:
        first = merged.pop(0)
        merged[-1][1] = max(merged[-1][1], first[1] + TWO_PI)
    if len(merged) == 1 and merged[0][1] - merged[0][0] >= TWO_PI - angle_eps:
        return AngularIntervalSet.full()
    out = []
    for s, e in merged:
        length = e - s
        if length < angle_eps:
            out.append(make_interval(s + 0.5 * length, 0.0))
        else:
            out.append(make_interval(s, length))
    out.sort(key=lambda iv: iv.start)
    return AngularIntervalSet(tuple(out), False)


def interval_set_intersect(
    a: AngularIntervalSet, b: AngularIntervalSet, angle_eps: float = DEFAULT_TOLERANCE.angle_eps
) -> AngularIntervalSet:
    """Intersection of two interval sets.

    Overlaps shorter than angle_eps, including near misses by less than
    angle_eps, survive as point components.
    """
    if a.full_circle:
        return b
    if b.full_circle:
        return a
    pieces = []
    for I in a.intervals:
        lI = I.length
        for J in b.intervals:
            lJ = J.length
            d = float(np.mod(J.start - I.start, TWO_PI))
            for shift in (d, d - TWO_PI):
                lo = max(0.0, shift)
                hi = min(lI, shift + lJ)
                if hi - lo >= -angle_eps:
                    if hi < lo:
                        lo = hi = 0.5 * (lo + hi)
                    pieces.append((I.start + lo, hi - lo))
    return normalize_pieces(pieces, angle_eps)


def ball_arc_on_circle(
    circle: Circle3, v, tol: Tolerance = DEFAULT_TOLERANCE
) -> AngularIntervalSet:
    """Angles theta with ``|circle(theta) - v| <= 1``.

    Tangencies within the eq_dist band give a point component; a circle
    lying inside the ball up to the band gives the full circle.
    """
    v = as_point(v)
    d = v - circle.center
    r = circle.radius
    alpha = float(d @ circle.frame_u)
    beta = float(d @ circle.frame_w)
    rho = float(np.hypot(alpha, beta))
    D = (float(d @ d) + r * r - 1.0) / (2.0 * r)
    # |x - v|^2 - 1 = 2r(D - (alpha cos + beta sin)); band on squared distance
    band = tol.eq_dist * (2.0 + tol.eq_dist) / (2.0 * r)
    if D + rho <= band:
        return AngularIntervalSet.full()
    if D - rho > band:
        return AngularIntervalSet.empty()
    phi0 = float(np.arctan2(beta, alpha))
    if rho == 0.0:
        return AngularIntervalSet.full()
    half = float(np.arccos(np.clip(D / rho, -1.0, 1.0)))
    if 2.0 * half < tol.angle_eps:
        return AngularIntervalSet((make_interval(phi0, 0.0),), False)
    return AngularIntervalSet((make_interval(phi0 - half, 2.0 * half),), False)


def circle_distance_extremes(
    circle: Circle3, v, tol: Tolerance = DEFAULT_TOLERANCE
) -> tuple[float, float]:
    """Angles of the nearest and farthest circle points from v."""
    d = as_point(v) - circle.center
    alpha = float(d @ circle.frame_u)
    beta = float(d @ circle.frame_w)
    if np.hypot(alpha, beta) <= tol.eq_dist:
        raise AxisDegenerate("point lies on the circle axis")
    tmin = canon_angle(np.arctan2(beta, alpha))
    return tmin, canon_angle(tmin + np.pi)


# ----------------------------------------------------------------------------
# Minimal enclosing ball


def _ball_from_support(R: Sequence[np.ndarray]) -> Ball:
    if len(R) == 0:
        return Ball(np.zeros(3), -1.0)
    if len(R) == 1:
        return Ball(R[0].copy(), 0.0)
    if len(R) == 2:
        c = 0.5 * (R[0] + R[1])
        return Ball(c, float(np.linalg.norm(R[0] - c)))
    if len(R) == 3:
        a, b, c = R
        ab, ac = b - a, c - a
        n = np.cross(ab, ac)
        nn = float(n @ n)
        if nn < 1e-24 * max(float(ab @ ab) * float(ac @ ac), 1e-300):
            return _widest_pair(R)
        center = a + (
            np.cross(n, ab) * float(ac @ ac) + np.cross(ac, n) * float(ab @ ab)
        ) / (2.0 * nn)
        return Ball(center, float(max(np.linalg.norm(p - center) for p in R)))
    P = np.array(R)
    A = 2.0 * (P[1:] - P[0])
    rhs = np.sum(P[1:] ** 2, axis=1) - np.sum(P[0] ** 2)
    scale = max(float(np.max(np.abs(A))), 1e-300)
    if abs(np.linalg.det(A / scale)) < 1e-12:
        # coplanar support: the smallest ball through three of them
        best = None
        for skip in range(4):
            sub = [R[i] for i in range(4) if i != skip]
            b = _ball_from_support(sub)
            if all(np.linalg.norm(p - b.center) <= b.radius * (1 + 1e-12) + 1e-15 for p in R):
                if best is None or b.radius < best.radius:
                    best = b
        return best if best is not None else _widest_pair(R)
    center = np.linalg.solve(A, rhs)
    return Ball(center, float(max(np.linalg.norm(p - center) for p in R)))


def _widest_pair(R):
    best = (0.0, 0, 0)
    for i in range(len(R)):
        for j in range(i + 1, len(R)):
            d = float(np.linalg.norm(R[i] - R[j]))
            if d > best[0]:
                best = (d, i, j)
    return _ball_from_support([R[best[1]], R[best[2]]])


def _welzl(P: list[np.ndarray], R: list[np.ndarray], slack: float) -> Ball:
    ball = _ball_from_support(R)
    if len(R) == 4:
        return ball
    for i, p in enumerate(P):
        if ball.radius < 0 or np.linalg.norm(p - ball.center) > ball.radius + slack:
            ball = _welzl(P[:i], R + [p], slack)
    return ball


def circumball(points) -> Ball:
    """Smallest closed ball containing the points.

    Points are sorted lexicographically first, so the result does not depend
    on the input order.
    """
    P = np.asarray(points, dtype=float).reshape(-1, 3) if len(points) else np.zeros((0, 3))
    if P.shape[0] == 0:
        raise EmptyInput("circumball of an empty point set")
    if not np.all(np.isfinite(P)):
        raise ValueError("non-finite coordinates")
    order = np.lexsort(P.T[::-1])
    P = P[order]
    P = np.unique(P, axis=0)
    scale = float(np.max(np.abs(P))) if P.size else 1.0
    slack = 1e-13 * max(scale, 1.0)
    ball = _welzl([p for p in P], [], slack)
    radius = float(np.max(np.linalg.norm(P - ball.center, axis=1)))
    return Ball(ball.center, radius)


def circumradius(points) -> float:
    return circumball(points).radius


# ----------------------------------------------------------------------------
# Spherical convex hull


def spherical_hull_membership(
    apex, generators, x, tol: Tolerance = DEFAULT_TOLERANCE
) -> bool:
    """Whether x lies in the spherical convex hull of generators on S(apex).

    Decided as cone membership: ``x - apex`` is a nonnegative combination
    of the ``g - apex``.
    """
    apex, x = as_point(apex), as_point(x)
    G = np.asarray(generators, dtype=float).reshape(-1, 3)
    if G.shape[0] == 0:
        return False
    dirs = G - apex
    for d in list(dirs) + [x - apex]:
        if abs(np.linalg.norm(d) - 1.0) > tol.eq_dist:
            raise NotOnSphere(f"point at distance {np.linalg.norm(d):.12g} from apex")
    _, resid = nnls(dirs.T, x - apex)
    return bool(resid <= 10 * tol.eq_dist)
