import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import (
    er_edges,
    make_net,
    make_node,
    oracle_betweenness,
    oracle_closeness,
    oracle_degree,
    path_net,
    star_net,
)
from freight_resilience.centrality import (
    CentralityScores,
    RankedNodes,
    betweenness_centrality,
    betweenness_exact,
    closeness_centrality,
    degree_centrality,
    rank_mapping,
    rank_nodes,
    write_ranking_csv,
    write_scores_csv,
)
from freight_resilience.network import FreightNetwork


class TestDegree:
    def test_path(self, path3):
        assert degree_centrality(path3).scores == {1: 1.0, 2: 2.0, 3: 1.0}

    def test_normalized_star(self, star5):
        scores = degree_centrality(star5, normalized=True).scores
        assert scores[1] == 1.0
        assert scores[2] == 0.25

    def test_single_node(self):
        net = make_net(1, [])
        assert degree_centrality(net, normalized=True).scores == {1: 0.0}


class TestCloseness:
    def test_path_endpoints(self, path3):
        scores = closeness_centrality(path3).scores
        assert scores[2] == 1.0
        assert scores[1] == pytest.approx(2 / 3)
        assert scores[3] == scores[1]

    def test_raw_is_inverse_distance_sum(self, path3):
        raw = closeness_centrality(path3, normalized=False).scores
        assert raw[2] == 0.5  # distances 1 + 1
        assert raw[1] == pytest.approx(1 / 3)

    def test_isolated_node_scores_zero(self):
        net = make_net(3, [(1, 2)])
        scores = closeness_centrality(net).scores
        assert scores[3] == 0.0

    def test_component_correction_on_two_pairs(self):
        # two disjoint edges in a 4-node graph: reach 1, distance 1,
        # so each node scores (1/3) * (1/1) = 1/3
        net = make_net(4, [(1, 2), (3, 4)])
        scores = closeness_centrality(net).scores
        assert all(v == pytest.approx(1 / 3) for v in scores.values())

    def test_bounded_even_when_disconnected(self):
        rng = random.Random(99)
        for trial in range(20):
            net = make_net(12, er_edges(12, 0.15, rng))
            for v in closeness_centrality(net).scores.values():
                assert 0.0 <= v <= 1.0


class TestBetweenness:
    def test_path_middle(self, path3):
        assert betweenness_centrality(path3).scores == {1: 0.0, 2: 1.0, 3: 0.0}

    def test_star_hub_counts_leaf_pairs(self, star5):
        # 4 leaves -> C(4,2) = 6 pairs routed through the hub
        assert betweenness_centrality(star5).scores[1] == 6.0

    def test_cycle_splits_pairs(self):
        # on C4 each opposite pair has two shortest paths, 1/2 through
        # each intermediate node
        net = make_net(4, [(1, 2), (2, 3), (3, 4), (1, 4)])
        exact = betweenness_exact(net)
        assert all(v == Fraction(1, 2) for v in exact.values())

    def test_normalized_star(self, star5):
        scores = betweenness_centrality(star5, normalized=True).scores
        assert scores[1] == 1.0

    def test_tiny_graphs_normalize_to_zero(self):
        for n in (1, 2):
            net = make_net(n, [(1, 2)] if n == 2 else [])
            assert set(betweenness_centrality(net, normalized=True).scores.values()) == {0.0}


SEEDED_GRAPHS = [(n, p, seed) for seed, (n, p) in enumerate(
    (5 + (s * 7) % 26, p) for s in range(40) for p in (0.1, 0.3, 0.6)
)]


@pytest.mark.parametrize("n,p,seed", SEEDED_GRAPHS[:36])
def test_oracle_agreement_on_er_graphs(n, p, seed):
    """Degree/closeness/betweenness vs the brute-force oracles."""
    net = make_net(n, er_edges(n, p, random.Random(seed)))
    assert degree_centrality(net).scores == {
        v: float(d) for v, d in oracle_degree(net).items()
    }
    expected = oracle_closeness(net)
    got = closeness_centrality(net).scores
    assert all(abs(got[v] - expected[v]) <= 1e-9 for v in got)
    assert betweenness_exact(net) == oracle_betweenness(net)


def test_betweenness_pair_sum_identity():
    """Summed betweenness counts interior nodes of every shortest path:
    sum_i bc(i) = sum over connected pairs of (d(s,t) - 1)."""
    rng = random.Random(7)
    for _ in range(15):
        n = rng.randint(4, 20)
        net = make_net(n, er_edges(n, 0.3, rng))
        from conftest import oracle_distance_matrix
        import numpy as np

        dist = oracle_distance_matrix(net)
        finite = dist[np.triu_indices_from(dist, k=1)]
        finite = finite[np.isfinite(finite)]
        expected = Fraction(int((finite - 1).sum()))
        assert sum(betweenness_exact(net).values(), Fraction(0)) == expected


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=4, max_value=14))
def test_relabeling_invariance(seed, n):
    """Scores depend on structure, not on node ids."""
    rng = random.Random(seed)
    edges = er_edges(n, 0.4, rng)
    net = make_net(n, edges)
    shift = {i: i + 100 for i in range(1, n + 1)}
    relabeled = FreightNetwork.build(
        [make_node(shift[i]) for i in range(1, n + 1)],
        [(shift[a], shift[b]) for a, b in edges],
    )
    for fn in (degree_centrality, closeness_centrality, betweenness_centrality):
        original = fn(net).scores
        moved = fn(relabeled).scores
        assert all(moved[shift[v]] == original[v] for v in original)


class TestRanking:
    def test_tie_broken_by_ascending_id(self):
        ranked = rank_mapping({3: 2.0, 1: 2.0, 2: 1.0}, k=2, kind="degree")
        assert ranked.entries == ((1, 1, 2.0), (2, 3, 2.0))

    def test_rank_nodes_star(self, star5):
        ranked = rank_nodes(degree_centrality(star5), k=3)
        assert ranked.node_ids[0] == 1
        assert ranked.entries[0][0] == 1

    def test_k_bounds(self, star5):
        scores = degree_centrality(star5)
        with pytest.raises(ValueError):
            rank_nodes(scores, k=0)
        with pytest.raises(ValueError):
            rank_nodes(scores, k=6)

    def test_order_independent_of_mapping_insertion(self):
        a = rank_mapping({1: 1.0, 2: 3.0, 3: 2.0}, k=3, kind="degree")
        b = rank_mapping({3: 2.0, 2: 3.0, 1: 1.0}, k=3, kind="degree")
        assert a == b

    def test_ranked_nodes_validates_order(self):
        with pytest.raises(ValueError):
            RankedNodes("degree", ((1, 1, 1.0), (2, 2, 5.0)))  # score increases
        with pytest.raises(ValueError):
            RankedNodes("degree", ((1, 1, 1.0), (3, 2, 0.5)))  # rank gap


class TestScoreContainers:
    def test_normalized_scores_must_fit_unit_interval(self):
        with pytest.raises(ValueError):
            CentralityScores("degree", {1: 1.5}, normalized=True)

    def test_negative_scores_rejected(self):
        with pytest.raises(ValueError):
            CentralityScores("degree", {1: -0.1}, normalized=False)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            CentralityScores("pagerank", {1: 0.5}, normalized=True)


class TestCsvExports:
    def test_scores_csv_shape(self, tmp_path, star5):
        path = tmp_path / "scores.csv"
        write_scores_csv([degree_centrality(star5), closeness_centrality(star5)], path)
        lines = path.read_text().splitlines()
        assert lines[0] == "node_id,kind,score,normalized"
        assert len(lines) == 1 + 2 * 5
        assert lines[1] == "1,degree,4.0,false"

    def test_ranking_csv_shape(self, tmp_path, star5):
        path = tmp_path / "ranking.csv"
        names = {i: f"n{i}" for i in star5.node_ids}
        write_ranking_csv(rank_nodes(degree_centrality(star5), k=2), names, path)
        lines = path.read_text().splitlines()
        assert lines == ["rank,node_id,name,score", "1,1,n1,4.0", "2,2,n2,1.0"]
