from collections import Counter

import numpy as np
import pytest

from ballpoly.errors import DualEdgeConflict, InvalidArcSelection, InvalidParity, InvalidSpec
from ballpoly.duality import canonical_duality
from ballpoly.faces import build_face_complex
from ballpoly.generators import (
    add_dangling_vertices,
    ball_truncate,
    regular_tetrahedron,
    reuleaux_height,
    rugby_ball,
    suspended_polygon,
    tetrahedron_arc_point,
    tetrahedron_with_arc_points,
    two_pole_family,
)
from ballpoly.vazsonyi import check_extremal, critical_core, diameter_graph

FOUR_GAPS = [0.0, 1.5, 3.0, 4.5]


def main_diagonals(P):
    m = len(P)
    return np.array([np.linalg.norm(P[i] - P[(i + m // 2) % m]) for i in range(m)])


# ---------------------------------------------------------------- tetrahedron family


def test_tetrahedron_alone():
    V = tetrahedron_with_arc_points({})
    assert V.n == 4 and diameter_graph(V).e == 6
    D = V.distances[np.triu_indices(4, 1)]
    assert np.allclose(D, 1, atol=1e-15)


def test_one_arc_point():
    V = tetrahedron_with_arc_points({"12": 1})
    assert (V.n, diameter_graph(V).e) == (5, 8)
    d = np.linalg.norm(V.points[:4] - V.point(4), axis=1)
    assert np.allclose(d[[0, 3]], 1, atol=1e-12) and np.all(d[[1, 2]] < 1)


def test_three_adjacent_arcs():
    V = tetrahedron_with_arc_points({"01": 2, "02": 1, "03": 1})
    assert (V.n, diameter_graph(V).e) == (8, 14)
    assert check_extremal(V).is_extremal


def test_arcs_missing_a_vertex_are_allowed():
    V = tetrahedron_with_arc_points({"01": 1, "12": 1, "02": 1})
    assert check_extremal(V).is_extremal


def test_opposite_arcs_rejected():
    with pytest.raises(InvalidArcSelection):
        tetrahedron_with_arc_points({"01": 1, "23": 1})


def test_arc_point_distances():
    T = regular_tetrahedron()
    rng = np.random.default_rng(4)
    arcs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    for _ in range(200):
        a, b = rng.choice(6, 2, replace=False)
        (i, j), (k, l) = arcs[a], arcs[b]
        x = tetrahedron_arc_point(T, i, j, rng.uniform(0.05, 0.95))
        y = tetrahedron_arc_point(T, k, l, rng.uniform(0.05, 0.95))
        if {i, j} & {k, l}:
            assert np.linalg.norm(x - y) < 1
        else:
            assert np.linalg.norm(x - y) > 1


# ---------------------------------------------------------------- suspended polygons


def test_k2_is_regular_tetrahedron():
    V = suspended_polygon(2)
    assert np.allclose(V.distances[np.triu_indices(4, 1)], 1, atol=1e-12)


def test_k3_geometry():
    V = suspended_polygon(3)
    R = np.linalg.norm(V.points[0])
    assert R == pytest.approx(0.525731, abs=1e-6)
    assert V.point(5)[2] == pytest.approx(0.850651, abs=1e-6)


@pytest.mark.parametrize("k", range(2, 9))
def test_suspended_distances(k):
    V = suspended_polygon(k)
    m = 2 * k - 1
    apex = V.point(m)
    assert np.all(np.abs(np.linalg.norm(V.points[:m] - apex, axis=1) - 1) <= 1e-12)
    assert np.all(np.abs(main_diagonals(V.points[:m]) - 1) <= 1e-12)
    assert diameter_graph(V).e == 4 * k - 2


def test_suspended_rejects_small_k():
    with pytest.raises(InvalidSpec):
        suspended_polygon(1)


# ---------------------------------------------------------------- rugby balls


def test_rugby_three_half():
    V = rugby_ball(3, 0.5)
    assert V.n == 3
    FC = build_face_complex(V)
    assert FC.v == 2 and FC.f == 3 and all(F.is_digonal for F in FC.facets.values())


def test_reuleaux_height_three():
    assert reuleaux_height(3) == pytest.approx(np.sqrt(2 / 3), abs=1e-15)
    V = rugby_ball(3)
    assert np.allclose(main_diagonals(V.points), 1, atol=1e-12)


@pytest.mark.parametrize("n", [5, 7, 9])
def test_reuleaux_diagonals(n):
    V = rugby_ball(n)
    assert np.all(np.abs(main_diagonals(V.points) - 1) <= 1e-9)
    h = V.meta["h"]
    for pole in ([0, 0, h], [0, 0, -h]):
        assert np.allclose(np.linalg.norm(V.points - pole, axis=1), 1, atol=1e-12)


def test_reuleaux_parity():
    with pytest.raises(InvalidParity):
        rugby_ball(4)


def test_poles_included():
    V = rugby_ball(5, include_poles=True)
    assert V.n == 7 and V.point(5)[2] > 0 and V.point(6)[2] < 0


# ---------------------------------------------------------------- two-pole family


def test_two_pole_full_w():
    V = two_pole_family(0.5, FOUR_GAPS, {i: [0.5] for i in range(4)})
    man = V.meta["manifest"]
    assert man["surviving_gaps"] == [] and sorted(man["isolated_points"]) == [0, 1, 2, 3]
    FC = build_face_complex(V)
    pq = [x for x in FC.vertices if {0, 1} <= set(x.incident_generators)]
    assert len(pq) == 4
    # in-plane placement: t = 0.5 sits at distance 1 from both neighbouring boundary points
    r = np.sqrt(1 - 0.25)
    for k in range(4):
        w = V.point(2 + k)
        assert abs(w[2]) < 1e-12
        for a in (FOUR_GAPS[k], FOUR_GAPS[(k + 1) % 4]):
            assert np.linalg.norm(w - [r * np.cos(a), r * np.sin(a), 0]) == pytest.approx(1, abs=1e-12)


def test_two_pole_empty_gap_survives():
    V = two_pole_family(0.5, FOUR_GAPS, {1: [0.5], 2: [0.5], 3: [0.5]})
    assert V.meta["manifest"]["surviving_gaps"] == [0]
    FC = build_face_complex(V)
    pq = [e for e in FC.edges if set(e.generator_pair) == {0, 1}]
    assert len(pq) == 1 and pq[0].length == pytest.approx(1.5, abs=1e-9)


def test_two_points_on_one_gap():
    V = two_pole_family(0.5, FOUR_GAPS, {0: [0.3, 0.7]})
    FC = build_face_complex(V)
    assert FC.f == 4
    for lab in (2, 3):
        assert len(FC.facets[lab].edges) == 2


def test_two_pole_invalid_specs():
    # a half-circle gap is ambiguous; a single point is not a polygon; h must lie in (0, 1)
    for args in ((0.5, [0.0, np.pi]), (0.5, [1.0]), (1.2, FOUR_GAPS), (0.5, [0.0, 0.0, 2.0])):
        with pytest.raises(InvalidSpec):
            two_pole_family(*args, {})
    with pytest.raises(InvalidSpec):
        two_pole_family(0.5, FOUR_GAPS, {0: [1.2]})


def test_one_long_gap_allowed():
    V = two_pole_family(0.5, [0.0, 1.0, 2.0], {0: [0.5], 1: [0.5]})
    assert V.meta["manifest"]["long_gap"] == 2


# ---------------------------------------------------------------- truncation


@pytest.mark.parametrize("k", [2, 3, 4])
def test_truncated_counts(k):
    V = suspended_polygon(k)
    m = 2 * k - 1
    W = ball_truncate(V, m, 0.05)
    assert W.n == 2 * m + 1
    assert diameter_graph(W).e == 4 * m == 2 * W.n - 2


def test_truncated_degree_sequence_and_core():
    m = 5
    W = ball_truncate(suspended_polygon(3), 5, 0.05)
    deg = diameter_graph(W).degrees()
    # cap point sees the m skeleton points; skeleton points sit on a diagonal circle; ring points gain two
    assert Counter(deg.values()) == Counter({m: 1, 3: m, 4: m})
    assert deg[W.meta["cap_point"]] == m
    assert critical_core(W) == W


@pytest.mark.parametrize("eps", [0.1, 0.05, 0.01, 0.002])
def test_truncation_points_near_vertex(eps):
    V = suspended_polygon(3)
    W = ball_truncate(V, 5, eps)
    c = V.point(5)
    for lab in W.meta["skeleton_points"]:
        assert np.linalg.norm(W.point(lab) - c) <= 3 * eps


def test_truncation_epsilon_range():
    with pytest.raises(InvalidSpec):
        ball_truncate(suspended_polygon(3), 5, 0.2)


# ---------------------------------------------------------------- dangling additions


def test_one_dangling_on_tetrahedron(tetra):
    W = add_dangling_vertices(tetra, [(0, 0.5)])
    assert W.n == 5 and diameter_graph(W).e == 8
    row = W.meta["manifest"][0]
    assert row["label"] == 4 and row["edge"] == 0
    assert set(row["dual_endpoints"]) == set(row["generator_pair"])


def test_dual_edges_conflict(tetra):
    d = canonical_duality(build_face_complex(tetra))
    with pytest.raises(DualEdgeConflict):
        add_dangling_vertices(tetra, [(0, 0.5), (d.edge_to_edge[0], 0.5)])


def test_non_dual_edges_grow_by_two_each(pentagon):
    FC = build_face_complex(pentagon)
    d = canonical_duality(FC)
    chosen, blocked = [], set()
    for e in FC.edges:
        if e.id in blocked:
            continue
        chosen.append(e.id)
        blocked |= {e.id, d.edge_to_edge[e.id]}
        if len(chosen) == 3:
            break
    W = add_dangling_vertices(pentagon, [(e, 0.4) for e in chosen])
    assert diameter_graph(W).e == diameter_graph(pentagon).e + 2 * len(chosen)
    FCW = build_face_complex(W)
    assert len(FCW.dangling_vertices) == len(chosen)
