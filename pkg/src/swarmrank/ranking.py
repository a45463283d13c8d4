"""Exact iterative influence rankings: PageRank, root-biased PageRank, In-Degree.

These serve as ground truth for the particle simulator. All three return
normalized :class:`RankVector` values. The two iterative algorithms run a
sparse power iteration until the L1 change between successive vectors drops
below an absolute tolerance.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .graph import DirectedGraph, RootSet

__all__ = [
    "RankVector",
    "PageRankParams",
    "PriorsParams",
    "ConvergenceReport",
    "pagerank",
    "pagerank_priors",
    "indegree",
    "save_ranks",
    "load_ranks",
]

RANK_SUM_TOL = 1e-9


@dataclass
class RankVector:
    """Dense per-node influence scores.

    ``normalized`` is True when the scores form a probability distribution
    (non-negative, summing to 1 within ``RANK_SUM_TOL``).
    """

    scores: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.scores.ndim != 1:
            raise ValueError("scores must be one-dimensional")
        if np.any(self.scores < 0) or not np.all(np.isfinite(self.scores)):
            raise ValueError("scores must be finite and non-negative")

    def normalize(self) -> "RankVector":
        """Return a copy scaled to sum to 1. No-op if already normalized."""
        if self.normalized:
            return self
        total = self.scores.sum()
        if total <= 0.0:
            raise ValueError("cannot normalize an all-zero rank vector")
        return RankVector(self.scores / total, normalized=True)

    def __len__(self) -> int:
        return int(self.scores.size)

    def __getitem__(self, node: int) -> float:
        return float(self.scores[node])


@dataclass
class PageRankParams:
    """Dampening factor, convergence tolerance and iteration cap."""

    dampening: float = 0.15
    tolerance: float = 1e-8
    max_iterations: int = 200

    def __post_init__(self):
        if not 0.0 <= self.dampening <= 1.0:
            raise ValueError("dampening must lie in [0, 1]")
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class PriorsParams:
    """Back-probability and root set for relative ranking."""

    beta: float
    roots: RootSet
    tolerance: float = 1e-8
    max_iterations: int = 200

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class ConvergenceReport:
    """How the power iteration stopped."""

    iterations_used: int
    final_delta: float
    converged: bool


def _transition_matrix(graph: DirectedGraph):
    """Column-stochastic walk operator (transposed) plus the dangling mask."""
    if not graph.is_out_normalized:
        raise ValueError("graph out-weights must be normalized; "
                         "call normalize_out_weights first")
    src, dst, w = graph.edge_arrays()
    n = graph.node_count
    matrix = sp.csr_matrix((w, (dst, src)), shape=(n, n))
    dangling = graph.out_degree == 0
    return matrix, dangling


def _power_iteration(matrix, dangling, restart, keep_walking, start, tolerance,
                     max_iterations):
    """Iterate ``x <- keep_walking * (Mx + dangling_mass * restart) + (1 - keep_walking) * restart``.

    Mass parked on dangling nodes re-enters through the restart distribution,
    so the update conserves total mass exactly.
    """
    x = start
    delta = np.inf
    iterations = 0
    has_dangling = bool(dangling.any())
    for iterations in range(1, max_iterations + 1):
        moved = matrix @ x
        if has_dangling:
            moved += x[dangling].sum() * restart
        x_next = keep_walking * moved + (1.0 - keep_walking) * restart
        delta = np.abs(x_next - x).sum()
        x = x_next
        if delta < tolerance:
            break
    return x, ConvergenceReport(iterations, float(delta), delta < tolerance)


def pagerank(graph: DirectedGraph, params: PageRankParams | None = None):
    """Dampened global influence ranking.

    Each step distributes a ``1 - dampening`` share of every node's influence
    along its outgoing edges and spreads the remaining ``dampening`` share
    uniformly; dangling-node mass is re-injected uniformly as well. Starts
    from the uniform vector. At full dampening every node scores ``1/n``.

    Returns ``(RankVector, ConvergenceReport)``.
    """
    if params is None:
        params = PageRankParams()
    matrix, dangling = _transition_matrix(graph)
    n = graph.node_count
    uniform = np.full(n, 1.0 / n)
    x, report = _power_iteration(
        matrix, dangling, uniform, 1.0 - params.dampening, uniform.copy(),
        params.tolerance, params.max_iterations,
    )
    return RankVector(x, normalized=False).normalize(), report


def pagerank_priors(graph: DirectedGraph, params: PriorsParams):
    """Influence ranking relative to a root set.

    Like :func:`pagerank`, but each step the walker returns with probability
    ``beta`` to a node drawn uniformly from the roots, and the walk also
    starts from that root distribution. Dangling mass re-enters through the
    roots. At ``beta = 1`` all influence sits on the roots, ``1/|roots|``
    each.
    """
    params.roots.validate(graph.node_count)
    matrix, dangling = _transition_matrix(graph)
    n = graph.node_count
    prior = np.zeros(n)
    prior[params.roots.sorted_ids()] = 1.0 / len(params.roots)
    x, report = _power_iteration(
        matrix, dangling, prior, 1.0 - params.beta, prior.copy(),
        params.tolerance, params.max_iterations,
    )
    return RankVector(x, normalized=False).normalize(), report


def indegree(graph: DirectedGraph) -> RankVector:
    """Normalized in-degree scores; uniform for a graph with no edges."""
    counts = graph.in_degree.astype(np.float64)
    if graph.edge_count == 0:
        return RankVector(np.full(graph.node_count, 1.0 / graph.node_count),
                          normalized=True)
    return RankVector(counts, normalized=False).normalize()


# -- CSV serialization ----------------------------------------------------


def save_ranks(ranks: RankVector, path) -> None:
    """Write ``node_id,score`` rows sorted by node id, with a header."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_id", "score"])
        for node, score in enumerate(ranks.scores):
            writer.writerow([node, repr(float(score))])


def load_ranks(path) -> RankVector:
    """Read a CSV written by :func:`save_ranks`."""
    nodes: list[int] = []
    scores: list[float] = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is not None and header[:2] != ["node_id", "score"]:
            # headerless file: first row is data
            nodes.append(int(header[0]))
            scores.append(float(header[1]))
        for row in reader:
            if not row:
                continue
            nodes.append(int(row[0]))
            scores.append(float(row[1]))
    order = np.argsort(nodes)
    arr = np.asarray(scores, dtype=np.float64)[order]
    vec = RankVector(arr)
    if abs(arr.sum() - 1.0) <= RANK_SUM_TOL:
        vec.normalized = True
    return vec
