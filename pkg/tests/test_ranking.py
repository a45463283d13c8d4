import numpy as np
import pytest

from swarmrank import (
    DirectedGraph,
    PageRankParams,
    PriorsParams,
    RankVector,
    RootSet,
    indegree,
    load_ranks,
    normalize_out_weights,
    pagerank,
    pagerank_priors,
    pearson,
    save_ranks,
)

from conftest import desk_graph, dense_pagerank_solve, dense_priors_solve


class TestPageRank:
    def test_two_cycle_is_symmetric(self, two_cycle):
        for dampening in (0.0, 0.15, 0.5, 0.9):
            ranks, _ = pagerank(two_cycle, PageRankParams(dampening))
            np.testing.assert_allclose(ranks.scores, [0.5, 0.5], atol=1e-12)

    def test_full_dampening_is_uniform(self):
        g = desk_graph(0)
        ranks, report = pagerank(g, PageRankParams(1.0))
        np.testing.assert_allclose(ranks.scores, 1.0 / g.node_count, atol=1e-15)
        assert report.converged

    def test_three_chain_matches_dense_solve(self, three_chain):
        # frozen oracle values: direct linear solve of the damped fixed point
        expected = np.array([400.0, 740.0, 1029.0]) / 2169.0
        np.testing.assert_allclose(
            dense_pagerank_solve(three_chain, 0.15), expected, atol=1e-12
        )
        ranks, report = pagerank(three_chain, PageRankParams(0.15, tolerance=1e-13))
        np.testing.assert_allclose(ranks.scores, expected, atol=1e-9)
        assert report.converged

    def test_requires_normalized_graph(self):
        g = DirectedGraph(3, [0, 0], [1, 2], [2.0, 2.0])
        with pytest.raises(ValueError, match="normalized"):
            pagerank(g)

    def test_weight_rescaling_is_irrelevant(self):
        a = normalize_out_weights(DirectedGraph(3, [0, 0, 1, 2], [1, 2, 2, 0],
                                                [2.0, 2.0, 1.0, 5.0]))
        b = normalize_out_weights(DirectedGraph(3, [0, 0, 1, 2], [1, 2, 2, 0],
                                                [1.0, 1.0, 3.0, 1.0]))
        ra, _ = pagerank(a)
        rb, _ = pagerank(b)
        np.testing.assert_allclose(ra.scores, rb.scores, atol=1e-12)

    def test_report_respects_iteration_cap(self):
        g = desk_graph(1)
        ranks, report = pagerank(g, PageRankParams(0.15, tolerance=1e-30,
                                                   max_iterations=7))
        assert report.iterations_used == 7
        assert not report.converged

    def test_normalized_output(self):
        for seed in range(3):
            g = desk_graph(seed)
            ranks, _ = pagerank(g)
            assert ranks.normalized
            assert abs(ranks.scores.sum() - 1.0) <= 1e-9
            assert np.all(ranks.scores >= 0)

    def test_dense_solve_equivalence_on_small_graphs(self):
        # random graphs up to 5 nodes, dangling nodes included
        rng = np.random.default_rng(123)
        for _ in range(25):
            n = int(rng.integers(2, 6))
            pairs = [(s, t) for s in range(n) for t in range(n) if s != t]
            keep = [p for p in pairs if rng.random() < 0.5]
            if not keep:
                keep = [pairs[0]]
            g = normalize_out_weights(
                DirectedGraph(n, [p[0] for p in keep], [p[1] for p in keep])
            )
            dampening = float(rng.uniform(0.05, 0.95))
            expected = dense_pagerank_solve(g, dampening)
            ranks, _ = pagerank(g, PageRankParams(dampening, tolerance=1e-13,
                                                  max_iterations=2000))
            np.testing.assert_allclose(ranks.scores, expected, atol=1e-9)


class TestPageRankPriors:
    def test_full_back_probability_sits_on_roots(self):
        g = desk_graph(2)
        roots = RootSet.of(range(0, 100))
        ranks, _ = pagerank_priors(g, PriorsParams(1.0, roots))
        np.testing.assert_allclose(ranks.scores[:100], 0.01, atol=1e-12)
        np.testing.assert_allclose(ranks.scores[100:], 0.0, atol=1e-12)

    def test_uniform_roots_match_pagerank_without_dangling(self):
        # on a dangling-free graph, roots = all nodes reduces to pagerank
        g = normalize_out_weights(
            DirectedGraph(4, [0, 1, 2, 3, 0], [1, 2, 3, 0, 2])
        )
        assert not np.any(g.out_degree == 0)
        pr, _ = pagerank(g, PageRankParams(0.3, tolerance=1e-13))
        prp, _ = pagerank_priors(
            g, PriorsParams(0.3, RootSet.of(range(4)), tolerance=1e-13)
        )
        np.testing.assert_allclose(prp.scores, pr.scores, atol=1e-10)

    def test_three_chain_matches_dense_solve(self, three_chain):
        # frozen oracle values for roots={0}, beta=0.5
        expected = np.array([4.0, 2.0, 1.0]) / 7.0
        np.testing.assert_allclose(
            dense_priors_solve(three_chain, 0.5, [0]), expected, atol=1e-12
        )
        ranks, _ = pagerank_priors(
            three_chain,
            PriorsParams(0.5, RootSet.of([0]), tolerance=1e-13),
        )
        np.testing.assert_allclose(ranks.scores, expected, atol=1e-9)

    def test_zero_beta_equals_plain_power_iteration(self):
        # oracle: undamped walk with dangling mass re-entering uniformly
        g = desk_graph(3)
        n = g.node_count
        src, dst, w = g.edge_arrays()
        x = np.full(n, 1.0 / n)
        for _ in range(400):
            nxt = np.zeros(n)
            np.add.at(nxt, dst, x[src] * w)
            nxt += x[g.out_degree == 0].sum() / n
            if np.abs(nxt - x).sum() < 1e-10:
                x = nxt
                break
            x = nxt
        ranks, _ = pagerank_priors(
            g, PriorsParams(0.0, RootSet.of(range(n)), tolerance=1e-10,
                            max_iterations=400)
        )
        np.testing.assert_allclose(ranks.scores, x, atol=1e-7)

    def test_empty_roots_rejected(self):
        with pytest.raises(ValueError, match="non-empty"):
            RootSet.of([])

    def test_roots_out_of_range_rejected(self, two_cycle):
        with pytest.raises(ValueError, match="out of range"):
            pagerank_priors(two_cycle, PriorsParams(0.5, RootSet.of([5])))

    def test_dense_solve_equivalence_on_small_graphs(self):
        rng = np.random.default_rng(321)
        for _ in range(25):
            n = int(rng.integers(2, 6))
            pairs = [(s, t) for s in range(n) for t in range(n) if s != t]
            keep = [p for p in pairs if rng.random() < 0.5]
            if not keep:
                keep = [pairs[0]]
            g = normalize_out_weights(
                DirectedGraph(n, [p[0] for p in keep], [p[1] for p in keep])
            )
            roots = sorted(rng.choice(n, size=int(rng.integers(1, n + 1)),
                                      replace=False).tolist())
            beta = float(rng.uniform(0.05, 0.95))
            expected = dense_priors_solve(g, beta, roots)
            ranks, _ = pagerank_priors(
                g, PriorsParams(beta, RootSet.of(roots), tolerance=1e-13,
                                max_iterations=2000)
            )
            np.testing.assert_allclose(ranks.scores, expected, atol=1e-9)


class TestInDegree:
    def test_star_graph(self, star_graph):
        ranks = indegree(star_graph)
        np.testing.assert_allclose(ranks.scores, [1.0, 0, 0, 0, 0], atol=1e-15)

    def test_two_cycle(self, two_cycle):
        np.testing.assert_allclose(indegree(two_cycle).scores, [0.5, 0.5])

    def test_matches_edge_tally(self):
        g = desk_graph(4)
        tally = np.zeros(g.node_count)
        for _, t, _ in g.edges:
            tally[t] += 1.0
        np.testing.assert_allclose(indegree(g).scores, tally / tally.sum(),
                                   atol=1e-12)

    def test_edgeless_graph_is_uniform(self):
        g = DirectedGraph(4, [], [])
        np.testing.assert_allclose(indegree(g).scores, 0.25)


class TestTeleportLimit:
    def test_correlation_with_indegree_rises_to_limit(self):
        lams = [0.005, 0.1, 0.2, 0.35, 0.5, 0.65, 0.8, 0.9, 0.95, 0.995]
        finals = []
        for seed in range(3):
            g = desk_graph(40 + seed)
            reference = indegree(g)
            corrs = [pearson(pagerank(g, PageRankParams(lam))[0], reference)
                     for lam in lams]
            # non-decreasing within sampling noise
            for earlier, later in zip(corrs, corrs[1:]):
                assert later >= earlier - 0.005
            finals.append(corrs[-1])
        assert np.mean(finals) >= 0.99


class TestRankVectorIO:
    def test_round_trip(self, tmp_path):
        g = desk_graph(5)
        ranks, _ = pagerank(g)
        path = tmp_path / "ranks.csv"
        save_ranks(ranks, path)
        loaded = load_ranks(path)
        np.testing.assert_array_equal(loaded.scores, ranks.scores)
        assert loaded.normalized

    def test_header_and_order(self, tmp_path):
        path = tmp_path / "ranks.csv"
        save_ranks(RankVector(np.array([0.25, 0.5, 0.25]), normalized=True), path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "node_id,score"
        assert lines[1].startswith("0,")

    def test_rank_vector_validation(self):
        with pytest.raises(ValueError):
            RankVector(np.array([0.5, -0.1]))
        with pytest.raises(ValueError):
            RankVector(np.array([np.inf, 1.0]))
        with pytest.raises(ValueError, match="all-zero"):
            RankVector(np.zeros(3)).normalize()
