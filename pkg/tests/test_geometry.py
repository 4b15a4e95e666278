import numpy as np
import pytest
from hypothesis import given, strategies as st

from ballpoly.errors import (
    AxisDegenerate,
    DegenerateCoincident,
    DegenerateEmptyOrPoint,
    EmptyInput,
    NotOnSphere,
    ToleranceConflict,
)
from ballpoly.geometry import (
    TWO_PI,
    AngularIntervalSet,
    Tolerance,
    ball_arc_on_circle,
    circle_distance_extremes,
    circumball,
    intersection_circle,
    interval_set_intersect,
    make_interval,
    normalize_pieces,
    spherical_hull_membership,
)
from ballpoly.generators import regular_tetrahedron

from conftest import random_unit

coords = st.floats(-1.0, 1.0, allow_nan=False)
point = st.tuples(coords, coords, coords).map(np.array)


def iset(*pairs):
    """Interval set from (start, end) pairs."""
    return AngularIntervalSet(tuple(make_interval(s, (e - s) % TWO_PI) for s, e in pairs))


def membership(S, thetas, eps=0.0):
    th = np.asarray(thetas, dtype=float)
    if S.full_circle:
        return np.ones(th.shape, bool)
    out = np.zeros(th.shape, bool)
    for iv in S.intervals:
        off = np.mod(th - iv.start, TWO_PI)
        out |= (off <= iv.length + eps) | (off >= TWO_PI - eps)
    return out


# ---------------------------------------------------------------- tolerance


def test_tolerance_ordering_enforced():
    Tolerance(1e-9, 1e-7, 1e-9)
    for bad in [(1e-7, 1e-7, 1e-9), (0.0, 1e-7, 1e-9), (1e-9, 2e-3, 1e-9)]:
        with pytest.raises(ToleranceConflict):
            Tolerance(*bad)


# ---------------------------------------------------------------- circumball


def test_circumball_single_point():
    b = circumball([[0.3, -0.2, 0.9]])
    assert b.radius == 0.0
    assert np.allclose(b.center, [0.3, -0.2, 0.9])


def test_circumball_tetrahedron_unit_edge():
    assert circumball(regular_tetrahedron()).radius == pytest.approx(np.sqrt(3 / 8), abs=1e-12)


def test_circumball_two_points():
    b = circumball([[0, 0, 0], [1, 0, 0]])
    assert b.radius == pytest.approx(0.5)
    assert np.allclose(b.center, [0.5, 0, 0])


def test_circumball_empty():
    with pytest.raises(EmptyInput):
        circumball([])


def test_circumball_permutation_invariant(rng):
    P = rng.normal(size=(30, 3))
    b0 = circumball(P)
    for _ in range(5):
        b = circumball(P[rng.permutation(30)])
        assert np.array_equal(b.center, b0.center) and b.radius == b0.radius


@pytest.mark.parametrize("n", [2, 3, 4, 7, 25])
def test_circumball_no_local_improvement(rng, n):
    for _ in range(10):
        P = rng.normal(size=(n, 3))
        b = circumball(P)
        far = np.linalg.norm(P - b.center, axis=1).max()
        assert abs(far - b.radius) <= 1e-12
        dirs = random_unit(rng, 1000)
        moved = b.center + 1e-6 * dirs
        worst = np.linalg.norm(P[None, :, :] - moved[:, None, :], axis=2).max(axis=1)
        assert worst.min() >= b.radius - 1e-12


# ---------------------------------------------------------------- circles


def test_intersection_circle_unit_distance():
    C = intersection_circle([0, 0, 0], [1, 0, 0])
    assert C.radius == pytest.approx(np.sqrt(3) / 2, abs=1e-15)


def test_intersection_circle_poles():
    C = intersection_circle([0, 0, 0.6], [0, 0, -0.6])
    assert np.allclose(C.center, 0)
    assert C.radius == pytest.approx(0.8, abs=1e-15)
    assert abs(abs(C.normal[2]) - 1) < 1e-15


def test_intersection_circle_sqrt2_against_direct_solve():
    p, q = np.array([0.1, 0.2, 0.3]), np.array([0.1, 0.2, 0.3]) + np.array([1.0, 1.0, 0.0])
    C = intersection_circle(p, q)
    # points at distance 1 from both: in the bisector plane at distance sqrt(1 - 1/2) from the midpoint
    mid = 0.5 * (p + q)
    x = mid + np.sqrt(1 - 0.5) * np.array([0.0, 0.0, 1.0])
    assert np.linalg.norm(x - p) == pytest.approx(1) and np.linalg.norm(x - q) == pytest.approx(1)
    assert C.radius == pytest.approx(np.linalg.norm(x - mid), abs=1e-14)
    assert C.radius == pytest.approx(np.sqrt(2) / 2, abs=1e-14)


def test_intersection_circle_degenerate():
    with pytest.raises(DegenerateCoincident):
        intersection_circle([0, 0, 0], [0, 0, 1e-12])
    with pytest.raises(DegenerateEmptyOrPoint):
        intersection_circle([0, 0, 0], [0, 0, 2.0])


def test_circle_frame_is_right_handed(rng):
    for _ in range(50):
        p = rng.normal(size=3)
        q = p + 1.5 * random_unit(rng)
        C = intersection_circle(p, q)
        M = np.array([C.frame_u, C.frame_w, C.normal])
        assert np.allclose(M @ M.T, np.eye(3), atol=1e-14)
        assert np.linalg.det(M) == pytest.approx(1.0)
        assert C.normal @ (q - p) > 0


@given(point, point, st.floats(0.0, TWO_PI))
def test_circle_points_at_unit_distance(p, dq, theta):
    n = np.linalg.norm(dq)
    if n < 1e-3:
        return
    q = p + dq / n * (0.05 + 1.9 * n / np.sqrt(3))
    C = intersection_circle(p, q)
    x = C.point(theta)
    assert abs(np.linalg.norm(x - p) - 1) <= 1e-12
    assert abs(np.linalg.norm(x - q) - 1) <= 1e-12


# ---------------------------------------------------------------- ball arcs


def test_ball_arc_full_when_centered():
    C = intersection_circle([0, 0, 0.5], [0, 0, -0.5])
    assert ball_arc_on_circle(C, C.center).full_circle


def test_ball_arc_empty_when_far():
    C = intersection_circle([0, 0, 0.5], [0, 0, -0.5])
    assert ball_arc_on_circle(C, [1 + C.radius + 0.01, 0, 0]).is_empty


def test_ball_arc_matches_dense_sampling():
    C = intersection_circle([0, 0, 0.5], [0, 0, -0.5])
    v = C.center + 2 * C.radius * C.frame_u
    S = ball_arc_on_circle(C, v)
    assert len(S) == 1
    iv = S.intervals[0]
    assert iv.midpoint == pytest.approx(0.0, abs=1e-12) or iv.midpoint == pytest.approx(TWO_PI, abs=1e-12)
    theta = np.linspace(0, TWO_PI, 1_000_000, endpoint=False)
    inside = np.linalg.norm(C.point(theta) - v, axis=1) <= 1.0
    # half-width measured from the samples: inside set is symmetric around 0
    sampled_half = np.max(np.where(inside, np.minimum(theta, TWO_PI - theta), 0.0))
    assert iv.length / 2 == pytest.approx(sampled_half, abs=TWO_PI / 1_000_000 * 1.5)


def test_ball_arc_agrees_with_predicate_random(rng):
    worst = 0
    for _ in range(1000):
        p = rng.normal(size=3) * 0.3
        q = p + rng.uniform(0.2, 1.8) * random_unit(rng)
        C = intersection_circle(p, q)
        v = C.center + rng.uniform(0, 1.5) * random_unit(rng)
        S = ball_arc_on_circle(C, v)
        th = rng.uniform(0, TWO_PI, 10_000)
        d = np.linalg.norm(C.point(th) - v, axis=1)
        truth = d <= 1.0
        got = membership(S, th, 0.0)
        # disagreement allowed only inside the distance band
        bad = (truth != got) & (np.abs(d - 1) > 1e-9)
        worst = max(worst, int(bad.sum()))
    assert worst == 0


# ---------------------------------------------------------------- distance extremes


def test_extremes_in_plane():
    C = intersection_circle([0, 0, 0.5], [0, 0, -0.5])
    v = C.center + 3 * C.frame_u
    tmin, tmax = circle_distance_extremes(C, v)
    assert tmin == pytest.approx(0, abs=1e-15) and tmax == pytest.approx(np.pi)


def test_extremes_on_circle():
    C = intersection_circle([0, 0, 0.5], [0, 0, -0.5])
    tmin, _ = circle_distance_extremes(C, C.point(1.234))
    assert tmin == pytest.approx(1.234, abs=1e-12)


def test_extremes_axis_degenerate():
    C = intersection_circle([0, 0, 0.5], [0, 0, -0.5])
    with pytest.raises(AxisDegenerate):
        circle_distance_extremes(C, [0, 0, 3])


def test_extremes_dense_oracle(rng):
    theta = np.linspace(0, TWO_PI, 1_000_000, endpoint=False)
    for _ in range(5):
        p = rng.normal(size=3) * 0.2
        C = intersection_circle(p, p + 1.2 * random_unit(rng))
        pts = C.point(theta)
        v = rng.normal(size=3)
        tmin, tmax = circle_distance_extremes(C, v)
        d = np.linalg.norm(pts - v, axis=1)
        for t, k in ((tmin, np.argmin(d)), (tmax, np.argmax(d))):
            gap = abs((theta[k] - t + np.pi) % TWO_PI - np.pi)
            assert gap < 1e-5


def test_extremes_monotone_between(rng):
    for _ in range(1000):
        p = rng.normal(size=3) * 0.2
        C = intersection_circle(p, p + rng.uniform(0.1, 1.9) * random_unit(rng))
        v = rng.normal(size=3)
        tmin, _ = circle_distance_extremes(C, v)
        chain = tmin + np.linspace(1e-3, np.pi - 1e-3, 40)
        d = np.linalg.norm(C.point(chain) - v, axis=1)
        assert np.all(np.diff(d) > 0)
        d2 = np.linalg.norm(C.point(tmin - (chain - tmin)) - v, axis=1)
        assert np.all(np.diff(d2) > 0)


# ---------------------------------------------------------------- interval sets


def test_intersect_with_full_is_identity():
    X = iset((1.0, 2.0), (4.0, 5.5))
    assert interval_set_intersect(AngularIntervalSet.full(), X) == X
    assert interval_set_intersect(X, AngularIntervalSet.full()) == X


def test_intersect_simple():
    out = interval_set_intersect(iset((0, np.pi)), iset((np.pi / 2, 3 * np.pi / 2)))
    assert len(out) == 1
    assert out.intervals[0].start == pytest.approx(np.pi / 2)
    assert out.intervals[0].end == pytest.approx(np.pi)


def test_intersect_wrapping_against_sampling(rng):
    A, B = iset((3 * np.pi / 2, np.pi / 4)), iset((0, np.pi / 2))
    out = interval_set_intersect(A, B)
    assert len(out) == 1
    assert out.intervals[0].start == pytest.approx(0, abs=1e-15)
    assert out.intervals[0].end == pytest.approx(np.pi / 4)
    th = rng.uniform(0, TWO_PI, 10_000)
    assert np.array_equal(membership(out, th), membership(A, th) & membership(B, th))


def test_intersect_touching_gives_point_component():
    out = interval_set_intersect(iset((0, 1)), iset((1, 2)))
    assert len(out) == 1 and out.intervals[0].is_point
    assert out.intervals[0].start == pytest.approx(1)


arcs = st.lists(st.tuples(st.floats(0, TWO_PI - 1e-6), st.floats(0.01, 2.0)), min_size=0, max_size=4)


def _set(pieces):
    return normalize_pieces(pieces, 1e-9)


def _same(S, T, rng_seed=0):
    th = np.random.default_rng(rng_seed).uniform(0, TWO_PI, 4000)
    a, b = membership(S, th, 1e-9), membership(T, th, 1e-9)
    return np.array_equal(a, b) or np.all((a == b) | near_boundary(S, T, th))


def near_boundary(S, T, th):
    ends = []
    for X in (S, T):
        for iv in X.intervals:
            ends += [iv.start, iv.end]
    if not ends:
        return np.zeros_like(th, dtype=bool)
    e = np.array(ends)
    gap = np.abs((th[:, None] - e[None, :] + np.pi) % TWO_PI - np.pi)
    return gap.min(axis=1) < 1e-8


@given(arcs, arcs)
def test_intersect_commutative(a, b):
    A, B = _set(a), _set(b)
    assert _same(interval_set_intersect(A, B), interval_set_intersect(B, A))


@given(arcs, arcs, arcs)
def test_intersect_associative(a, b, c):
    A, B, C = _set(a), _set(b), _set(c)
    left = interval_set_intersect(interval_set_intersect(A, B), C)
    right = interval_set_intersect(A, interval_set_intersect(B, C))
    assert _same(left, right)


@given(arcs, arcs)
def test_intersect_is_set_intersection(a, b):
    A, B = _set(a), _set(b)
    out = interval_set_intersect(A, B)
    th = np.random.default_rng(1).uniform(0, TWO_PI, 4000)
    truth = membership(A, th) & membership(B, th)
    got = membership(out, th)
    assert np.all((truth == got) | near_boundary(A, B, th))


# ---------------------------------------------------------------- spherical hull


def test_spherical_hull_generator_itself():
    g = [[1, 0, 0], [0, 1, 0]]
    assert spherical_hull_membership([0, 0, 0], g, [1, 0, 0])


def test_spherical_hull_antipode_of_single_ray():
    assert not spherical_hull_membership([0, 0, 0], [[0, 0, 1]], [0, 0, -1])


def test_spherical_hull_geodesic_midpoint(rng):
    apex = rng.normal(size=3)
    for _ in range(20):
        g1, g2 = random_unit(rng), random_unit(rng)
        mid = (g1 + g2) / np.linalg.norm(g1 + g2)
        # explicit coefficients: mid = (g1 + g2) / |g1 + g2|, both nonnegative
        assert spherical_hull_membership(apex, [apex + g1, apex + g2], apex + mid)


def test_spherical_hull_off_sphere():
    with pytest.raises(NotOnSphere):
        spherical_hull_membership([0, 0, 0], [[2, 0, 0]], [1, 0, 0])
