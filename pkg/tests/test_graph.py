import io

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from infocapture.errors import EdgeListParseError, GraphValidationError
from infocapture.graph import (
    Graph,
    generate_cohort_network,
    generate_random_network,
    generate_scale_free,
    load_edge_list,
    write_edge_list,
    write_mapping,
)

from conftest import assert_graph_invariants


class TestLoadEdgeList:
    def test_simple(self):
        g = load_edge_list("0 1\n1 2")
        assert g.vertex_count == 3
        assert g.edge_set() == {(0, 1), (1, 2)}

    def test_empty(self):
        g = load_edge_list("")
        assert g.vertex_count == 0 and g.edge_count == 0

    def test_bytes_and_binary_stream(self):
        assert load_edge_list(b"0 1\n") == load_edge_list(io.BytesIO(b"0 1\n"))

    def test_self_loop_rejected(self):
        with pytest.raises(GraphValidationError, match="self-loop"):
            load_edge_list("0 0")

    @pytest.mark.parametrize("text", ["0 1\n0 1", "0 1\n1 0"])
    def test_duplicate_rejected(self, text):
        with pytest.raises(GraphValidationError, match="line 2: duplicate"):
            load_edge_list(text)

    def test_parse_error_has_line_number(self):
        with pytest.raises(EdgeListParseError) as exc:
            load_edge_list("0 1\n\n1 x\n")
        assert exc.value.lineno == 3

    @pytest.mark.parametrize("line", ["0", "0 1 2 3", "-1 2", "0 1 heavy"])
    def test_malformed(self, line):
        with pytest.raises(EdgeListParseError):
            load_edge_list(line)

    def test_comments_and_header(self):
        g = load_edge_list("# a comment\n# vertices: 10\n0 1\n\n# more\n3 4\n")
        assert g.vertex_count == 10
        assert list(g.degrees[:5]) == [1, 1, 0, 1, 1]

    def test_header_too_small(self):
        with pytest.raises(GraphValidationError):
            load_edge_list("# vertices: 2\n0 5\n")

    def test_weights(self):
        g = load_edge_list("1 2 3.0\n0 1 1.5\n")
        # weights follow the canonical edge order
        assert g.edge_set() == {(0, 1), (1, 2)}
        assert list(g.weights) == [1.5, 3.0]

    def test_mixed_weights_rejected(self):
        with pytest.raises(EdgeListParseError):
            load_edge_list("0 1 2.0\n1 2\n")

    def test_remap(self):
        g = load_edge_list("alice bob\nbob carol\n", remap=True)
        assert g.vertex_count == 3
        assert g.labels == ("alice", "bob", "carol")
        out = io.StringIO()
        write_mapping(g, out)
        assert out.getvalue().splitlines() == ["vertex,label", "0,alice", "1,bob", "2,carol"]

    def test_round_trip(self):
        g = generate_random_network(30, 0.2, seed=3)
        buf = io.StringIO()
        write_edge_list(g, buf, header=["kind: random"])
        buf.seek(0)
        assert load_edge_list(buf) == g

    def test_round_trip_keeps_isolated_tail(self):
        g = Graph.from_edges(5, [(0, 1)])
        buf = io.StringIO()
        write_edge_list(g, buf)
        assert load_edge_list(buf.getvalue()).vertex_count == 5


class TestGraph:
    def test_from_edges_canonicalizes(self):
        g = Graph.from_edges(4, [(3, 1), (0, 2), (1, 0)])
        assert g.edges.tolist() == [[0, 1], [0, 2], [1, 3]]
        assert g.degrees.tolist() == [2, 2, 1, 1]

    def test_immutable(self):
        g = Graph.from_edges(2, [(0, 1)])
        with pytest.raises(ValueError):
            g.edges[0, 0] = 1
        with pytest.raises(AttributeError):
            g.vertex_count = 5

    def test_out_of_range(self):
        with pytest.raises(GraphValidationError):
            Graph.from_edges(2, [(0, 2)])

    def test_adjacency(self, path3):
        assert sorted(path3.neighbors(1).tolist()) == [0, 2]
        assert path3.neighbors(0).tolist() == [1]


class TestCohort:
    def test_two_pairs(self):
        assert generate_cohort_network(4, [1, 1, 2, 2]).edge_set() == {(0, 1), (2, 3)}

    def test_triangle(self):
        assert generate_cohort_network(3, [1, 1, 1]).edge_set() == {(0, 1), (0, 2), (1, 2)}

    def test_distinct(self):
        assert generate_cohort_network(2, [1, 2]).edge_count == 0

    def test_length_mismatch(self):
        with pytest.raises(GraphValidationError):
            generate_cohort_network(3, [1, 2])

    @given(st.lists(st.integers(0, 5), max_size=40))
    def test_components_are_cliques(self, labels):
        g = generate_cohort_network(len(labels), labels)
        assert_graph_invariants(g)
        nxg = nx.Graph()
        nxg.add_nodes_from(range(g.vertex_count))
        nxg.add_edges_from(g.edge_set())
        for comp in nx.connected_components(nxg):
            k = len(comp)
            assert nxg.subgraph(comp).number_of_edges() == k * (k - 1) // 2


class TestRandom:
    def test_p0(self):
        assert generate_random_network(10, 0.0, seed=1).edge_count == 0

    def test_p1(self):
        assert generate_random_network(10, 1.0, seed=1).edge_count == 45

    @pytest.mark.parametrize("p", [-0.1, 1.5, float("nan")])
    def test_bad_p(self, p):
        with pytest.raises(GraphValidationError):
            generate_random_network(10, p, seed=1)

    def test_deterministic(self):
        assert generate_random_network(200, 0.1, seed=5) == generate_random_network(200, 0.1, seed=5)
        assert generate_random_network(200, 0.1, seed=5) != generate_random_network(200, 0.1, seed=6)

    def test_binomial_edge_count(self):
        # oracle: |E| ~ Binomial(C(n,2), p); every seed within 4 sd of the mean
        n, p = 1000, 0.5
        pairs = n * (n - 1) // 2
        mean = pairs * p
        sd = np.sqrt(pairs * p * (1 - p))
        counts = np.array([generate_random_network(n, p, seed=s).edge_count for s in range(100)])
        assert mean == 249750
        assert np.all(np.abs(counts - mean) <= 4 * sd)
        # the sample mean of 100 draws has sd/10 spread
        assert abs(counts.mean() - mean) <= 4 * sd / 10

    def test_pair_marginals_uniform(self):
        # every pair position equally likely: compare per-row counts to expectation
        n, p = 60, 0.3
        hits = np.zeros((n, n))
        for s in range(400):
            for u, v in generate_random_network(n, p, seed=s).edges:
                hits[u, v] += 1
        iu = np.triu_indices(n, 1)
        freq = hits[iu] / 400
        assert abs(freq.mean() - p) < 0.01
        assert np.all(np.abs(freq - p) < 5 * np.sqrt(p * (1 - p) / 400))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 60), st.floats(0, 1), st.integers(0, 2**32 - 1))
    def test_invariants(self, n, p, seed):
        assert_graph_invariants(generate_random_network(n, p, seed=seed))


class TestScaleFree:
    def test_tree(self):
        g = generate_scale_free(5, 1, seed=0)
        assert g.edge_count == 4
        assert g.is_connected()

    def test_edge_count(self):
        assert generate_scale_free(100, 2, seed=0).edge_count == 197

    @pytest.mark.parametrize("n,m", [(5, 0), (5, 5), (3, 4)])
    def test_bad_params(self, n, m):
        with pytest.raises(GraphValidationError):
            generate_scale_free(n, m, seed=0)

    def test_deterministic(self):
        assert generate_scale_free(300, 3, seed=9) == generate_scale_free(300, 3, seed=9)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(2, 80), st.integers(1, 5), st.integers(0, 10_000))
    def test_invariants_connected(self, n, m, seed):
        m = min(m, n - 1)
        g = generate_scale_free(n, m, seed=seed)
        assert_graph_invariants(g)
        assert g.edge_count == m * (m - 1) // 2 + (n - m) * m
        assert g.is_connected()

    @pytest.mark.slow
    def test_heavy_tail_vs_random(self):
        n = 10_000
        ratios = []
        for s in range(20):
            ba = generate_scale_free(n, 2, seed=s)
            p = ba.edge_count / (n * (n - 1) / 2)
            er = generate_random_network(n, p, seed=1000 + s)
            ratios.append(ba.degrees.max() / er.degrees.max())
        assert np.median(ratios) >= 3
