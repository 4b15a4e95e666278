import dataclasses

import networkx as nx
import numpy as np
import pytest

from ballpoly.checks import boundary_oracle, generator_sets, ray_boundary_points, stratum_census
from ballpoly.errors import InternalInvariantViolation, NotTight
from ballpoly.faces import (
    arc_is_short,
    build_face_complex,
    edge_is_short,
    euler_characteristic,
    facet_components,
    is_two_connected,
    multigraph_two_connected,
    vertex_valence_check,
)
from ballpoly.geometry import TWO_PI, intersection_circle
from ballpoly.generators import rugby_ball, suspended_polygon, tetrahedron_with_arc_points, two_pole_family
from ballpoly.hull import Configuration

FOUR_GAPS = [0.0, 1.5, 3.0, 4.5]


def all_families():
    yield "tetra", tetrahedron_with_arc_points({})
    for k in (2, 3, 4):
        yield f"suspended{k}", suspended_polygon(k)
    for n in (3, 4, 5, 6):
        yield f"rugby{n}", rugby_ball(n, 0.5)
    yield "rugby5r", rugby_ball(5)
    yield "rugby5poles", rugby_ball(5, include_poles=True)
    yield "arcs", tetrahedron_with_arc_points({"01": 2, "02": 1, "03": 1})
    yield "twopole_full", two_pole_family(0.5, FOUR_GAPS, {i: [0.5] for i in range(4)})
    yield "twopole_one", two_pole_family(0.5, FOUR_GAPS, {0: [0.5]})
    yield "twopole_two", two_pole_family(0.5, FOUR_GAPS, {0: [0.3, 0.7]})


FAMILIES = dict(all_families())


@pytest.fixture(scope="module")
def complexes():
    return {k: build_face_complex(V) for k, V in FAMILIES.items()}


# ---------------------------------------------------------------- counts


def test_rugby3_counts(complexes):
    FC = complexes["rugby3"]
    assert FC.counts == (2, 3, 3)
    assert all(F.is_digonal for F in FC.facets.values())
    assert len(FC.principal_vertices) == 2


def test_suspended_pentagon_counts(complexes):
    FC = complexes["suspended3"]
    assert FC.counts == (6, 10, 6)
    sizes = sorted(len(F.vertices) for F in FC.facets.values())
    # a pyramid over a pentagon: five triangles and one pentagon
    assert sizes == [3, 3, 3, 3, 3, 5]


def test_tetrahedron_counts_match_stratum_census(complexes, tetra):
    census = stratum_census(tetra, 200_000, 1e-2, np.random.default_rng(3))
    by_size = {}
    for key in census:
        by_size[len(key)] = by_size.get(len(key), 0) + 1
    # strata: facets (1 generator), edges (2), vertices (3)
    assert (by_size.get(3, 0), by_size.get(2, 0), by_size.get(1, 0)) == complexes["tetra"].counts
    assert complexes["tetra"].counts == (4, 6, 4)


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_euler_relation(complexes, name):
    assert euler_characteristic(complexes[name]) == 2


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_two_connected(complexes, name):
    assert is_two_connected(complexes[name])


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_valence_census(complexes, name):
    rep = vertex_valence_check(complexes[name])
    assert rep.ok, rep.failures


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_structure_invariants(complexes, name):
    FC = complexes[name]
    V = FC.config
    for F in FC.facets.values():
        assert len(F.vertices) >= 2
        assert len([v for v in F.vertices if FC.vertices[v].kind == "principal"]) >= 2
        for i, eid in enumerate(F.edges):
            e = FC.edges[eid]
            assert F.generator in e.generator_pair
            a, b = F.vertices[i], F.vertices[(i + 1) % len(F.vertices)]
            assert {a, b} == set(e.endpoints) or a == b
    for e in FC.edges:
        # every edge on exactly two facets
        assert sum(e.id in F.edges for F in FC.facets.values()) == 2
        for vid, t in zip(e.endpoints, (0.0, 1.0)):
            assert np.linalg.norm(e.point(t) - FC.vertices[vid].position) < 1e-7
    for x in FC.vertices:
        assert sum(x.id in F.vertices for F in FC.facets.values()) == len(x.incident_generators)
        if x.kind == "dangling":
            assert len(x.incident_generators) == 2 and x.label is not None
            assert np.allclose(x.position, V.point(x.label))
        else:
            assert len(x.incident_generators) >= 3


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_pair_components_bounded(name):
    V = FAMILIES[name]
    for i in range(V.n):
        for j in range(i + 1, V.n):
            if V.dist(V.labels[i], V.labels[j]) >= 2 - 1e-9:
                continue
            S = facet_components(V.labels[i], V.labels[j], V)
            assert len(S) <= V.n - 2
            C = intersection_circle(V.points[i], V.points[j])
            for iv in S.point_components:
                x = C.point(iv.start)
                at_one = np.sum(np.abs(np.linalg.norm(V.points - x, axis=1) - 1) <= 1e-7)
                assert at_one >= 4


# ---------------------------------------------------------------- components


def test_rugby_adjacent_pair_is_one_pole_to_pole_arc(rugby3):
    S = facet_components(0, 1, rugby3)
    assert len(S) == 1 and not S.intervals[0].is_point
    C = intersection_circle(rugby3.point(0), rugby3.point(1))
    ends = C.point([S.intervals[0].start, S.intervals[0].end])
    FC = build_face_complex(rugby3)
    poles = FC.vertex_positions()
    for x in ends:
        assert np.min(np.linalg.norm(poles - x, axis=1)) < 1e-7


def test_two_pole_full_w_gives_isolated_points():
    V = FAMILIES["twopole_full"]
    S = facet_components(0, 1, V)
    assert len(S) == 4 and len(S.point_components) == 4
    C = intersection_circle(V.point(0), V.point(1))
    got = np.sort([C.point(iv.start)[:2] for iv in S.intervals], axis=0)
    r = C.radius
    want = np.sort(np.array([[r * np.cos(a), r * np.sin(a)] for a in FOUR_GAPS]), axis=0)
    assert np.allclose(got, want, atol=1e-7)


def sampled_components(V, p, q, m=100_000):
    C = intersection_circle(V.point(p), V.point(q))
    th = np.linspace(0, TWO_PI, m, endpoint=False)
    X = C.point(th)
    others = np.array([V.point(l) for l in V.labels if l not in (p, q)])
    inside = np.linalg.norm(X[:, None, :] - others[None], axis=2).max(axis=1) <= 1
    return th, inside


def test_two_pole_single_placement_against_sampling():
    V = two_pole_family(0.5, FOUR_GAPS, {0: [0.5]})
    S = facet_components(0, 1, V)
    th, inside = sampled_components(V, 0, 1)
    assert len(S) == 1
    iv = S.intervals[0]
    assert iv.length > np.pi
    off = np.mod(th - iv.start, TWO_PI)
    got = off <= iv.length
    edge = np.minimum(np.abs(off), np.abs(off - iv.length)) < 1e-4
    assert np.all((got == inside) | edge)
    # the cut-away part is exactly the occupied gap
    assert iv.length == pytest.approx(TWO_PI - 1.5, abs=1e-9)


def test_two_pole_without_w_is_full_circle():
    V = Configuration([[0, 0, 0.5], [0, 0, -0.5]])
    assert facet_components(0, 1, V).full_circle


def test_full_circle_with_three_points_is_an_invariant_violation():
    # the third point holds the whole circle inside its ball, so V is not tight
    V = Configuration([[0, 0, 0.5], [0, 0, -0.5], [0, 0, 0]])
    with pytest.raises(InternalInvariantViolation):
        facet_components(0, 1, V)
    with pytest.raises(NotTight):
        build_face_complex(V)


# ---------------------------------------------------------------- short edges


def test_pentagon_edges_short(complexes):
    FC = complexes["suspended3"]
    assert all(edge_is_short(FC, e.id) for e in FC.edges)


def test_long_gap_edge_is_long():
    V = two_pole_family(0.5, [0.0, 1.0, 2.0], {0: [0.5], 1: [0.5]})
    FC = build_face_complex(V)
    pq = [e for e in FC.edges if set(e.generator_pair) == {0, 1}]
    assert len(pq) == 1 and pq[0].length > np.pi
    assert not edge_is_short(FC, pq[0].id)


def test_semicircle_is_not_short():
    assert not arc_is_short(np.pi)
    assert not arc_is_short(np.pi - 1e-10)
    assert arc_is_short(np.pi - 1e-6)


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_plane_test_agrees_with_arc_length(complexes, name):
    FC = complexes[name]
    for e in FC.edges:
        edge_is_short(FC, e.id)  # raises on disagreement


# ---------------------------------------------------------------- valence and connectivity


def test_pentagon_valences(complexes):
    FC = complexes["suspended3"]
    assert sorted(FC.valence(x.id) for x in FC.vertices) == [3, 3, 3, 3, 3, 5]


def test_rugby_polygon_dangling_and_poles():
    FC = build_face_complex(rugby_ball(5))
    assert len(FC.dangling_vertices) == 5
    assert all(FC.valence(x.id) == 2 for x in FC.dangling_vertices)
    assert sorted(FC.valence(x.id) for x in FC.principal_vertices) == [5, 5]


def test_path_graph_not_two_connected():
    assert not multigraph_two_connected(nx.MultiGraph(nx.path_graph(4)))
    G = nx.MultiGraph()
    G.add_edges_from([(0, 1), (0, 1), (0, 1)])
    assert multigraph_two_connected(G)


# ---------------------------------------------------------------- boundary sampling


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_boundary_oracle(complexes, name):
    res = boundary_oracle(complexes[name], 40_000, np.random.default_rng(11))
    assert res.ok, res.disagreements
    assert res.checked > 30_000


def test_boundary_cover(complexes):
    rng = np.random.default_rng(5)
    for name in ("tetra", "suspended3", "rugby3"):
        V = complexes[name].config
        pts = ray_boundary_points(V, 10_000, rng)
        G = generator_sets(V, pts, 1e-9)
        assert np.all(G.sum(axis=1) >= 1)


def test_oracle_detects_a_corrupted_complex(complexes):
    FC = complexes["tetra"]
    lab = 0
    F = FC.facets[lab]
    # shift the circuit by one edge so each wedge is cut by the wrong sphere
    bad_F = dataclasses.replace(F, edges=F.edges[1:] + F.edges[:1])
    bad = dataclasses.replace(FC, facets={**FC.facets, lab: bad_F})
    res = boundary_oracle(bad, 40_000, np.random.default_rng(2))
    assert not res.ok


def test_facet_strict_spherical_convexity(complexes):
    rng = np.random.default_rng(9)
    for name in ("tetra", "suspended3", "suspended4", "arcs", "twopole_full"):
        FC = complexes[name]
        V = FC.config
        for lab, F in FC.facets.items():
            p = V.point(lab)
            others = np.delete(V.points, V.index(lab), axis=0)
            edge_pairs = {frozenset(FC.edges[e].endpoints) for e in F.edges}
            verts = list(F.vertices)
            for _ in range(1000 // len(FC.facets)):
                a, b = rng.choice(len(verts), 2, replace=False)
                xa, xb = FC.vertices[verts[a]].position - p, FC.vertices[verts[b]].position - p
                if np.linalg.norm(xa + xb) < 1e-6:
                    continue
                mid = p + (xa + xb) / np.linalg.norm(xa + xb)
                slack = 1 - np.linalg.norm(others - mid, axis=1).max()
                if frozenset((verts[a], verts[b])) in edge_pairs:
                    assert slack >= -1e-9
                else:
                    assert slack > 1e-9
