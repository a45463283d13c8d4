import numpy as np
import pytest

from swarmrank import DirectedGraph, generate_scale_free, normalize_out_weights

DESK_NODES = 1000
DESK_GAMMA = 2.5


def desk_graph(seed: int) -> DirectedGraph:
    """Standard study graph: 1000 nodes, gamma 2.5, normalized weights."""
    return normalize_out_weights(generate_scale_free(DESK_NODES, DESK_GAMMA, seed))


@pytest.fixture
def two_cycle() -> DirectedGraph:
    return normalize_out_weights(DirectedGraph(2, [0, 1], [1, 0]))


@pytest.fixture
def three_chain() -> DirectedGraph:
    """0 -> 1 -> 2; node 2 has no outgoing edges."""
    return normalize_out_weights(DirectedGraph(3, [0, 1], [1, 2]))


@pytest.fixture
def star_graph() -> DirectedGraph:
    """Four leaves all pointing at node 0."""
    return normalize_out_weights(DirectedGraph(5, [1, 2, 3, 4], [0, 0, 0, 0]))


def dense_pagerank_solve(graph, dampening):
    """Independent oracle: direct linear solve of the damped fixed point."""
    n = graph.node_count
    walk = np.zeros((n, n))
    for s, t, w in graph.edges:
        walk[t, s] = w
    dangling = (graph.out_degree == 0).astype(float)
    uniform = np.full(n, 1.0 / n)
    operator = np.eye(n) - (1.0 - dampening) * (walk + np.outer(uniform, dangling))
    return np.linalg.solve(operator, dampening * uniform)


def dense_priors_solve(graph, beta, root_ids):
    """Independent oracle: direct linear solve of the root-biased fixed point."""
    n = graph.node_count
    walk = np.zeros((n, n))
    for s, t, w in graph.edges:
        walk[t, s] = w
    dangling = (graph.out_degree == 0).astype(float)
    prior = np.zeros(n)
    prior[list(root_ids)] = 1.0 / len(root_ids)
    operator = np.eye(n) - (1.0 - beta) * (walk + np.outer(prior, dangling))
    return np.linalg.solve(operator, beta * prior)
