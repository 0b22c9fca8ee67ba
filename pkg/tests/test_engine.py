import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracle import build, expected_witness, colored_edges, plain_diameter, rainbow_distance_table, random_instance
from rainbowlab.engine import (
    ColorSet,
    bfs_diameter,
    bfs_distances,
    is_connected,
    is_rainbow_connected,
    max_layer_degree,
    rainbow_distance,
    rainbow_distances,
    rainbow_spheres,
)
from rainbowlab.exceptions import CapacityError
from rainbowlab.graphs import (
    GraphFamily,
    GraphLayer,
    SeedPlan,
    derive_params,
    sample,
    union_graph,
)


@st.composite
def instances(draw, max_n=9, max_s=4):
    n = draw(st.integers(2, max_n))
    s = draw(st.integers(1, max_s))
    model = draw(st.sampled_from(["family", "uniform"]))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = []
    for u, v in pairs:
        if model == "family":
            for c in range(s):
                if draw(st.booleans()):
                    edges.append((u, v, c))
        elif draw(st.booleans()):
            edges.append((u, v, draw(st.integers(0, s - 1))))
    return n, s, edges, build(n, s, edges, model)


def path_family(n, colors):
    """Path 0-1-...-(n-1) whose i-th edge has color colors[i]."""
    s = max(colors) + 1
    layers = []
    for c in range(s):
        us = [i for i, col in enumerate(colors) if col == c]
        layers.append(GraphLayer(n, us, [i + 1 for i in us]))
    return GraphFamily(tuple(layers))


class TestColorSet:
    def test_algebra(self):
        a, b = ColorSet.of([0, 2]), ColorSet.of([2, 5])
        assert list(a | b) == [0, 2, 5]
        assert list(a & b) == [2]
        assert list(a - b) == [0]
        assert len(ColorSet.full(7)) == 7
        assert ColorSet.of([2]) <= a and not a <= b
        assert 2 in a and 5 not in a and -1 not in a

    def test_bounds(self):
        with pytest.raises(ValueError):
            ColorSet.of([64])
        with pytest.raises(CapacityError):
            ColorSet.full(65)


class TestSmallCases:
    def test_path_distinct_colors(self):
        g = path_family(4, [0, 1, 2])
        assert rainbow_distance(g, 0, 3) == 3
        assert is_rainbow_connected(g).connected

    def test_star_single_color(self):
        g = GraphFamily((GraphLayer(5, [0, 0, 0, 0], [1, 2, 3, 4]), GraphLayer.empty(5)))
        res = rainbow_spheres(g, 0, ColorSet.of([0]))
        assert res.layers == (frozenset({0}), frozenset({1, 2, 3, 4}))
        assert rainbow_spheres(g, 1, ColorSet.of([0])).layers == (frozenset({1}), frozenset({0}))

    def test_two_color_path(self):
        g = path_family(3, [0, 1])
        assert rainbow_spheres(g, 0).layers[2] == {2}

    def test_isolated_vertex_is_witness(self):
        g = GraphFamily((GraphLayer(5, [0, 1], [2, 2]), GraphLayer(5, [0], [1])))
        assert is_rainbow_connected(g) == (False, (0, 3))
        g = GraphFamily((GraphLayer(3, [1], [2]),))
        assert is_rainbow_connected(g) == (False, (0, 1))

    def test_diameter_examples(self):
        assert bfs_diameter(GraphLayer(3, [0, 1], [1, 2])) == 2
        k5 = GraphLayer(5, *zip(*itertools.combinations(range(5), 2)))
        assert bfs_diameter(k5) == 1
        assert bfs_diameter(GraphLayer(4, [0, 2], [1, 3])) is None
        assert bfs_diameter(GraphLayer.empty(1)) == 0

    def test_path_repeated_color(self):
        g = path_family(3, [0, 0])
        assert rainbow_distance(g, 0, 2) is None
        verdict = is_rainbow_connected(g)
        assert not verdict and verdict.witness == (0, 2)

    def test_self_distance(self):
        g = path_family(3, [0, 1])
        assert rainbow_distance(g, 1, 1) == 0

    def test_revisit_with_other_colors(self):
        # 0-2 directly in color 0, 2-3 only in color 0: the vertex 2 must be
        # passed again through 0-1-2 (colors 1, 2) to reach 3
        layers = (
            GraphLayer(4, [0, 2], [2, 3]),
            GraphLayer(4, [0], [1]),
            GraphLayer(4, [1], [2]),
        )
        g = GraphFamily(layers)
        assert rainbow_distance(g, 0, 2) == 1
        assert rainbow_distance(g, 0, 3) == 3
        spheres = rainbow_spheres(g, 0)
        assert spheres.layers == (frozenset({0}), frozenset({1, 2}), frozenset(), frozenset({3}))

    def test_spheres_respect_allowed(self):
        g = path_family(4, [0, 1, 2])
        res = rainbow_spheres(g, 0, ColorSet.of([0, 1]))
        assert res.layers == (frozenset({0}), frozenset({1}), frozenset({2}))
        assert 3 not in res.reached()

    def test_spheres_reject_foreign_colors(self):
        g = path_family(3, [0, 1])
        with pytest.raises(ValueError):
            rainbow_spheres(g, 0, ColorSet.of([5]))

    def test_empty_graph(self):
        g = GraphFamily((GraphLayer.empty(5),))
        assert rainbow_spheres(g, 2).sizes() == [1, 0]
        assert not is_rainbow_connected(g)

    def test_single_vertex_pair(self):
        g = GraphFamily((GraphLayer(2, [0], [1]),))
        assert is_rainbow_connected(g) == (True, None)

    def test_capacity(self):
        n = 3
        g = GraphFamily(tuple(GraphLayer.empty(n) for _ in range(65)))
        with pytest.raises(CapacityError):
            is_rainbow_connected(g)
        with pytest.raises(CapacityError):
            rainbow_distance(g, 0, 1)

    def test_type_check(self):
        with pytest.raises(TypeError):
            is_rainbow_connected(GraphLayer(3, [0], [1]))


@given(instances())
def test_distances_match_oracle(inst):
    n, s, edges, g = inst
    table = rainbow_distance_table(n, edges)
    for u, v in itertools.product(range(n), repeat=2):
        assert rainbow_distance(g, u, v) == table[u][v]


@given(instances(), st.data())
def test_spheres_match_oracle(inst, data):
    n, s, edges, g = inst
    allowed = ColorSet.of(data.draw(st.sets(st.integers(0, s - 1))))
    source = data.draw(st.integers(0, n - 1))
    table = rainbow_distance_table(n, edges, set(allowed))
    res = rainbow_spheres(g, source, allowed)
    assert len(res.layers) == len(allowed) + 1
    for t, layer in enumerate(res.layers):
        assert layer == {v for v in range(n) if table[source][v] == t}


@given(instances(), st.sampled_from([None, 0, 1, 2, 5]))
def test_connectivity_matches_oracle(inst, budget):
    # tiny budgets force the meet-in-the-middle and fallback paths
    n, s, edges, g = inst
    table = rainbow_distance_table(n, edges)
    verdict = is_rainbow_connected(g, frontier_budget=budget)
    witness = expected_witness(n, edges, table)
    assert verdict.connected == (witness is None)
    assert verdict.witness == witness


@given(instances(max_n=12, max_s=5), st.data())
def test_pruning_is_sound(inst, data):
    n, s, edges, g = inst
    source = data.draw(st.integers(0, n - 1))
    np.testing.assert_array_equal(
        rainbow_distances(g, source, prune=True), rainbow_distances(g, source, prune=False)
    )


@given(instances())
def test_symmetry_and_sandwich(inst):
    n, s, edges, g = inst
    union = union_graph(g)
    for u in range(n):
        d = rainbow_distances(g, u)
        hop = bfs_distances(union, u)
        for v in range(n):
            assert (d[v] >= 0) == (rainbow_distance(g, v, u) is not None)
            if d[v] >= 0:
                assert d[v] == rainbow_distance(g, v, u)
                assert hop[v] <= d[v] <= s


@given(instances(), st.data())
def test_color_monotonicity(inst, data):
    # more colors can only bring vertices closer
    n, s, edges, g = inst
    small = ColorSet.of(data.draw(st.sets(st.integers(0, s - 1))))
    large = small | ColorSet.of(data.draw(st.sets(st.integers(0, s - 1))))
    source = data.draw(st.integers(0, n - 1))
    a = rainbow_distances(g, source, small, max_t=s)
    b = rainbow_distances(g, source, large, max_t=s)
    reached = a >= 0
    assert np.all(b[reached] >= 0)
    assert np.all(b[reached] <= a[reached])


def test_connected_implies_small_union_diameter():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n, s = int(rng.integers(2, 10)), int(rng.integers(1, 5))
        edges = random_instance(rng, n, s, 0.6)
        g = build(n, s, edges)
        if is_rainbow_connected(g):
            assert bfs_diameter(g) <= s


@pytest.mark.parametrize("model", ["family", "uniform"])
@pytest.mark.parametrize("s", [3, 6])
def test_budget_does_not_change_verdict(model, s):
    params = derive_params(150, s, 2.5, model)
    for i in range(6):
        g = sample(params, SeedPlan(11), i)
        verdicts = {is_rainbow_connected(g, frontier_budget=b) for b in (0, 3, 40, 10**9)}
        assert len(verdicts) == 1


def test_diameter_against_networkx():
    for i, p in enumerate([0.02, 0.05, 0.2]):
        g = sample(derive_params(130, 1, 2.0).with_p(p), SeedPlan(3), i)
        layer = g.layers[0]
        ref = nx.Graph(list(map(tuple, layer.edges())))
        ref.add_nodes_from(range(layer.n))
        expected = nx.diameter(ref) if nx.is_connected(ref) else None
        assert bfs_diameter(layer) == expected
        assert is_connected(layer) == nx.is_connected(ref)


def test_diameter_oracle_small():
    rng = np.random.default_rng(5)
    for _ in range(50):
        n = int(rng.integers(1, 9))
        edges = random_instance(rng, n, 2, 0.4)
        assert bfs_diameter(build(n, 2, edges)) == plain_diameter(n, edges)


def test_max_layer_degree_naive_recount():
    assert max_layer_degree(GraphFamily((GraphLayer.empty(4), GraphLayer.empty(4)))) == 0
    k3 = GraphLayer(3, [0, 0, 1], [1, 2, 2])
    assert max_layer_degree(GraphFamily((k3, GraphLayer.empty(3)))) == 2
    for i in range(5):
        g = sample(derive_params(200, 4, 3), SeedPlan(2), i)
        naive = 0
        for layer in g.layers:
            for v in range(g.n):
                naive = max(naive, sum(1 for a, b in layer.edges() if v in (a, b)))
        assert max_layer_degree(g) == naive


def test_max_layer_degree():
    fam = GraphFamily((GraphLayer(4, [0, 0, 0], [1, 2, 3]), GraphLayer(4, [1], [2])))
    assert max_layer_degree(fam) == 3
    uni = build(4, 2, [(0, 1, 0), (0, 2, 1), (0, 3, 0)], "uniform")
    assert max_layer_degree(uni) == 2
    assert colored_edges(uni) == [(0, 1, 0), (0, 2, 1), (0, 3, 0)]
