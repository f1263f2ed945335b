import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metric_cops.errors import (DisconnectedGraph, InvalidPoint, NonpositiveLength, OutOfRange,
                                UnknownVertex)
from metric_cops.generators import from_spec
from metric_cops.metric import (EdgePoint, MetricGraph, Vertex, build_metric_graph, diameter,
                                distance, geodesic, point_along, point_from_json, point_to_json,
                                validate_length_metric)
from oracles import brute_distance, dense_points, sampled_diameter


def test_k2_unit_edge():
    G = build_metric_graph(["u", "v"], [("u", "v", 1)])
    assert G.n_vertices == 2 and G.n_edges == 1
    assert distance(G, Vertex("u"), Vertex("v")) == 1.0
    assert diameter(G) == 1.0


def test_path_sum(path12):
    assert distance(path12, Vertex("u"), Vertex("w")) == 3.0
    assert diameter(path12) == 3.0


@pytest.mark.parametrize("length", [0, -1, float("inf"), float("nan")])
def test_bad_lengths_rejected(length):
    with pytest.raises(NonpositiveLength):
        build_metric_graph(["u", "v"], [("u", "v", length)])


def test_unknown_vertex_and_disconnected():
    with pytest.raises(UnknownVertex):
        build_metric_graph(["u"], [("u", "x", 1)])
    with pytest.raises(DisconnectedGraph):
        build_metric_graph(["u", "v", "w"], [("u", "v", 1)])


def test_self_loop_rejected():
    with pytest.raises(ValueError):
        build_metric_graph(["u", "v"], [("u", "v", 1), ("u", "u", 1)])


def test_parallel_edges_are_distinct_cells():
    G = build_metric_graph(["a", "b"], [("a", "b", 1.0), ("a", "b", 3.0)])
    assert G.n_edges == 2
    # a point in the middle of the long edge is 1.5 from each end
    assert distance(G, G.point(1, 1.5), Vertex("a")) == 1.5
    # the two edges form a circle of length 4
    assert diameter(G) == pytest.approx(2.0)


def test_c4_opposite_vertices_and_midpoints(c4):
    assert distance(c4, Vertex(0), Vertex(2)) == 2.0
    # midpoints of opposite edges: both routes are 2 long
    e01 = next(e for e, (u, v, _) in enumerate(c4.edges()) if {u, v} == {0, 1})
    e23 = next(e for e, (u, v, _) in enumerate(c4.edges()) if {u, v} == {2, 3})
    x, y = c4.point(e01, 0.5), c4.point(e23, 0.5)
    assert distance(c4, x, y) == pytest.approx(2.0, abs=1e-12)
    assert distance(c4, x, y) == pytest.approx(brute_distance(c4, x, y), abs=1e-12)


def test_canonical_endpoints(path12):
    assert path12.point(1, 0.0) == Vertex("v")
    assert path12.point(1, 2.0) == Vertex("w")
    assert path12.check(EdgePoint(0, 1.0)) == Vertex("v")
    with pytest.raises(InvalidPoint):
        path12.point(0, 1.5)
    with pytest.raises(InvalidPoint):
        path12.check(Vertex("zz"))
    with pytest.raises(InvalidPoint):
        distance(path12, Vertex("u"), EdgePoint(7, 0.1))


def test_geodesic_basic(path12):
    g = geodesic(path12, Vertex("u"), Vertex("w"))
    assert g.length == 3.0
    assert g.points == [Vertex("u"), Vertex("v"), Vertex("w")]
    same = geodesic(path12, Vertex("v"), Vertex("v"))
    assert same.points == [Vertex("v")] and same.length == 0.0


def test_geodesic_tie_break_c4(c4):
    g = geodesic(c4, Vertex(0), Vertex(2))
    # routes 0-1-2 and 0-3-2 tie; the smaller intermediate vertex wins
    assert [p.id for p in g.points] == [0, 1, 2]
    g = geodesic(c4, Vertex(1), Vertex(3))
    assert [p.id for p in g.points] == [1, 0, 3]


def test_point_along(path12):
    g = geodesic(path12, Vertex("u"), Vertex("w"))
    assert point_along(path12, g, 0) == Vertex("u")
    assert point_along(path12, g, 3.0) == Vertex("w")
    p = point_along(path12, g, 2.0)
    assert p == EdgePoint(1, 1.0)
    with pytest.raises(OutOfRange):
        point_along(path12, g, 3.5)
    with pytest.raises(OutOfRange):
        point_along(path12, g, -0.1)


def test_point_json_round_trip(path12):
    for p in [Vertex("u"), EdgePoint(1, 0.25)]:
        assert point_from_json(point_to_json(p)) == p


def test_graph_dict_round_trip(petersen):
    G2 = MetricGraph.from_dict(petersen.to_dict())
    assert np.array_equal(G2.all_pairs(), petersen.all_pairs())


@pytest.mark.parametrize("spec", ["cycle:4", "cycle:5", "path:4", "petersen", "grid:2x3",
                                  "complete:4", "tree:7"])
def test_diameter_matches_dense_sampling(spec):
    G = from_spec(spec, seed=3)
    exact = diameter(G)
    approx = sampled_diameter(G, per_edge=16)
    # the sample is a subset of points: never larger; at most one spacing smaller
    assert approx <= exact + 1e-9
    assert exact <= approx + G.mesh / 16 + 1e-9


def test_c4_diameter_is_attained_at_midpoints(c4):
    assert diameter(c4) == pytest.approx(2.0)


def test_diameter_weighted_and_parallel():
    G = build_metric_graph([0, 1, 2, 3], [(0, 1, 0.3), (1, 2, 1.7), (2, 3, 0.4), (3, 0, 2.9),
                                          (0, 2, 1.1), (1, 3, 2.2), (1, 2, 0.9)])
    assert diameter(G) <= sampled_diameter(G, 64) + G.mesh / 64 + 1e-9
    assert diameter(G) >= sampled_diameter(G, 64) - 1e-9


def test_validate_length_metric(c4):
    rep = validate_length_metric(c4, 1000, seed=0)
    assert rep.max_triangle_violation <= 1e-9
    assert rep.max_asymmetry == 0.0
    assert rep.max_geodesic_gap <= 1e-9
    assert rep.ok


def test_k2_symmetry():
    G = build_metric_graph(["u", "v"], [("u", "v", 1)])
    rep = validate_length_metric(G, 100, seed=1)
    assert rep.max_asymmetry == 0.0 and rep.ok


def _random_graph(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    edges = [(i, int(rng.integers(i)), float(rng.uniform(0.1, 3))) for i in range(1, n)]
    for _ in range(int(rng.integers(0, n))):
        u, v = (int(t) for t in rng.choice(n, 2, replace=False))
        edges.append((u, v, float(rng.uniform(0.1, 3))))
    return MetricGraph(range(n), edges), rng


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_metric_properties_random_graphs(seed):
    G, rng = _random_graph(seed)
    pts = [G.random_point(rng) for _ in range(6)]
    for x in pts:
        for y in pts:
            d = G.distance(x, y)
            assert d == G.distance(y, x)
            assert d == pytest.approx(brute_distance(G, x, y), abs=1e-9)
            g = G.geodesic(x, y)
            assert g.length == pytest.approx(d, abs=1e-9)
            assert d <= G.diameter() + 1e-9
            for z in pts:
                assert G.distance(x, z) <= d + G.distance(y, z) + 1e-9
            if d > 0:
                s = float(rng.uniform(0, d))
                p = G.point_along(g, s)
                assert G.distance(x, p) == pytest.approx(s, abs=1e-9)
                assert G.distance(p, y) == pytest.approx(d - s, abs=1e-9)


def test_within_is_bounded_distance(petersen, rng):
    for _ in range(50):
        x, y = petersen.random_point(rng), petersen.random_point(rng)
        d = petersen.distance(x, y)
        assert petersen.within(x, y, d + 1e-9) == pytest.approx(d)
        if d > 1e-6:
            assert petersen.within(x, y, d * 0.99) == math.inf


def test_nearest_vertex(path12):
    assert path12.nearest_vertex(EdgePoint(1, 0.5)) == Vertex("v")
    assert path12.nearest_vertex(EdgePoint(1, 1.5)) == Vertex("w")
    assert path12.nearest_vertex(EdgePoint(0, 0.5)) == Vertex("u")  # tie, lower rank


def test_geodesics_on_dense_points(c4):
    pts = dense_points(c4, 4)
    for x in pts:
        for y in pts:
            g = c4.geodesic(x, y)
            assert c4.path_length(g.points, g.edges) == pytest.approx(c4.distance(x, y), abs=1e-12)
