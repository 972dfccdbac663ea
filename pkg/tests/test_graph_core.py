import json
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import rooted_isomorphic, to_nx
import networkx as nx

from ricci_gap.errors import InputError
from ricci_gap.generators import complete, complete_bipartite, cycle, hypercube, path, petersen, random_regular, star
from ricci_gap.graph_core import (
    Graph,
    ball,
    bfs_layers,
    canonical_code,
    connected_components,
    graph_distance,
    is_connected,
    load_graph,
    parse_edge_list,
    rooted_code,
    sparsity_functional,
)


def relabel(g: Graph, perm) -> Graph:
    return Graph.from_edges(g.n, [(perm[u], perm[v]) for u, v in g.edges()])


@st.composite
def small_graphs(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, edges)


class TestGraph:
    def test_rejects_asymmetric(self):
        with pytest.raises(InputError):
            Graph(2, ((1,), ()))

    def test_rejects_self_loop(self):
        with pytest.raises(InputError):
            Graph.from_edges(2, [(0, 0)])

    def test_rejects_multi_edge(self):
        with pytest.raises(InputError):
            Graph.from_edges(2, [(0, 1), (1, 0)])

    def test_edge_count_is_half_degree_sum(self):
        g = petersen()
        assert g.edge_count == sum(g.degrees) // 2 == 15

    def test_json_round_trip(self):
        g = random_regular(30, 3, 5)
        assert Graph.from_dict(json.loads(g.to_json())) == g

    def test_json_rejects_unsorted(self):
        with pytest.raises(InputError):
            Graph.from_dict({"n": 3, "edges": [[1, 2], [0, 1]]})

    def test_json_rejects_reversed_pair(self):
        with pytest.raises(InputError):
            Graph.from_dict({"n": 3, "edges": [[1, 0]]})

    def test_edge_list_sorted_names(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("# triangle plus tail\n10 2\n2 3\n3 10\n3 7\n")
        g = load_graph(p)
        # names sort numerically: 2, 3, 7, 10
        assert g.n == 4
        assert set(g.edges()) == {(0, 1), (0, 3), (1, 3), (1, 2)}

    def test_edge_list_string_names(self):
        g = parse_edge_list("b a\nc b\n")
        assert g.n == 3 and set(g.edges()) == {(0, 1), (1, 2)}

    def test_load_json(self, tmp_path):
        p = tmp_path / "k3.json"
        p.write_text(complete(3).to_json())
        assert load_graph(p) == complete(3)


class TestBall:
    def test_radius_zero(self):
        b = ball(cycle(10), 0, 0)
        assert b.subgraph.n == 1 and b.subgraph.edge_count == 0

    def test_k4_whole(self):
        b = ball(complete(4), 2, 1)
        assert b.subgraph.n == 4 and b.subgraph.edge_count == 6
        assert b.original[b.root] == 2

    def test_cycle_path(self):
        b = ball(cycle(10), 0, 2)
        assert b.subgraph.n == 5
        assert rooted_isomorphic(b.subgraph, 0, path(5), 2)

    def test_layers(self):
        b = ball(hypercube(4), 0, 2)
        assert b.layer_of[0] == 0
        assert max(b.layer_of) == 2
        assert sorted(b.layer_of).count(1) == 4

    def test_out_of_range(self):
        with pytest.raises(InputError):
            ball(cycle(5), 5, 1)

    def test_grows_and_saturates(self):
        g = random_regular(40, 3, 2)
        sizes = [ball(g, 0, t).subgraph.n for t in range(12)]
        assert sizes == sorted(sizes)
        diam = nx.diameter(to_nx(g))
        assert ball(g, 0, diam).subgraph.n == g.n


class TestDistance:
    def test_examples(self):
        g = cycle(10)
        assert graph_distance(g, 3, 3) == 0
        assert graph_distance(g, 0, 5) == 5
        two = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
        assert graph_distance(two, 0, 4) == math.inf
        assert not is_connected(two)
        assert connected_components(two) == [[0, 1, 2], [3, 4, 5]]

    def test_invalid(self):
        with pytest.raises(InputError):
            graph_distance(cycle(4), 0, 9)

    @settings(max_examples=40, deadline=None)
    @given(small_graphs(), st.data())
    def test_symmetry_and_triangle(self, g, data):
        x, y, z = (data.draw(st.integers(0, g.n - 1)) for _ in range(3))
        dxy, dyx = graph_distance(g, x, y), graph_distance(g, y, x)
        assert dxy == dyx
        assert dxy <= graph_distance(g, x, z) + graph_distance(g, z, y)

    def test_matches_networkx(self):
        g = random_regular(60, 3, 9)
        ref = dict(nx.all_pairs_shortest_path_length(to_nx(g)))
        for x in range(0, 60, 7):
            assert bfs_layers(g, x) == ref[x]


class TestCanonicalCode:
    def test_cycle_rootings_equal(self):
        g = cycle(8)
        assert rooted_code(g, 0, 2) == rooted_code(g, 5, 2)

    def test_star_centre_vs_leaf(self):
        g = star(3)
        assert rooted_code(g, 0, 1) != rooted_code(g, 1, 1)

    def test_c6_vs_c7(self):
        b6, b7 = ball(cycle(6), 0, 3), ball(cycle(7), 0, 3)
        assert not rooted_isomorphic(b6.subgraph, 0, b7.subgraph, 0)
        assert canonical_code(b6) != canonical_code(b7)

    @settings(max_examples=60, deadline=None)
    @given(small_graphs(max_n=7), st.integers(0, 2**32))
    def test_code_equality_matches_brute_force(self, g, seed):
        rnd = random.Random(seed)
        h = Graph.from_edges(g.n, [e for e in g.edges() if rnd.random() < 0.8])
        for r1, r2 in ((0, 0), (0, g.n - 1)):
            c1 = canonical_code(ball(g, r1, g.n))
            c2 = canonical_code(ball(h, r2, h.n))
            b1, b2 = ball(g, r1, g.n), ball(h, r2, h.n)
            assert (c1 == c2) == rooted_isomorphic(b1.subgraph, 0, b2.subgraph, 0)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32))
    def test_relabeling_invariance(self, seed):
        rnd = random.Random(seed)
        g = random_regular(20, 3, seed)
        perm = list(range(g.n))
        rnd.shuffle(perm)
        h = relabel(g, perm)
        o = rnd.randrange(g.n)
        assert rooted_code(g, o, 3) == rooted_code(h, perm[o], 3)

    def test_nonisomorphic_cubic_balls_differ(self):
        a = rooted_code(petersen(), 0, 2)
        b = rooted_code(hypercube(3), 0, 2)
        assert a != b


class TestSparsity:
    def test_regular(self):
        assert sparsity_functional(petersen()) == pytest.approx(3 * math.log(3), abs=1e-14)

    def test_star(self):
        assert sparsity_functional(complete_bipartite(1, 3)) == pytest.approx(3 * math.log(3) / 4, abs=1e-14)

    def test_k5(self):
        assert sparsity_functional(complete(5)) == pytest.approx(4 * math.log(4), abs=1e-14)

    def test_empty(self):
        with pytest.raises(InputError):
            sparsity_functional(Graph(0, ()))

    @settings(max_examples=30, deadline=None)
    @given(small_graphs())
    def test_nonnegative(self, g):
        assert sparsity_functional(g) >= 0
