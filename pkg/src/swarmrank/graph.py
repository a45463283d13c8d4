"""Directed weighted graphs: representation, scale-free generation, and TSV I/O.

Node ids are dense integers in ``[0, node_count)``. Graphs are immutable once
constructed and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "DirectedGraph",
    "RootSet",
    "EdgeListFormatError",
    "generate_scale_free",
    "normalize_out_weights",
    "load_graph",
    "save_graph",
    "load_root_set",
    "in_capacity",
]

# Weight sums within this tolerance of 1.0 count as a probability distribution.
NORMALIZATION_TOL = 1e-12

# A generation round gives each proposing node this many target draws before
# it sits the round out.
_ATTEMPTS_PER_ROUND = 8


class EdgeListFormatError(ValueError):
    """Raised for malformed edge-list files; carries the offending line number."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class DirectedGraph:
    """Immutable directed graph with per-edge weights.

    Self-loops and duplicate ``(source, target)`` pairs are rejected. Edges
    are stored in CSR-like form grouped by source node, which gives O(1)
    access to each node's outgoing edges.

    Parameters
    ----------
    node_count : int
        Number of nodes; ids run from 0 to ``node_count - 1``.
    sources, targets : array-like of int
        Parallel arrays defining the directed edges.
    weights : array-like of float, optional
        Non-negative edge weights; defaults to 1.0 everywhere.
    """

    __slots__ = (
        "node_count",
        "_src",
        "_dst",
        "_w",
        "_offsets",
        "in_degree",
        "out_degree",
        "_normalized",
        "_edge_cdf",
    )

    def __init__(self, node_count, sources, targets, weights=None, _normalized=None):
        if node_count < 1:
            raise ValueError("node_count must be >= 1")
        src = np.asarray(sources, dtype=np.int64)
        dst = np.asarray(targets, dtype=np.int64)
        if src.shape != dst.shape or src.ndim != 1:
            raise ValueError("sources and targets must be 1-d arrays of equal length")
        if weights is None:
            w = np.ones(src.size, dtype=np.float64)
        else:
            w = np.asarray(weights, dtype=np.float64)
            if w.shape != src.shape:
                raise ValueError("weights must match the number of edges")
        if src.size:
            if src.min() < 0 or src.max() >= node_count:
                raise ValueError("edge source out of range")
            if dst.min() < 0 or dst.max() >= node_count:
                raise ValueError("edge target out of range")
            if np.any(src == dst):
                bad = int(src[np.argmax(src == dst)])
                raise ValueError(f"self-loop at node {bad} is not allowed")
            keys = src * node_count + dst
            if np.unique(keys).size != keys.size:
                raise ValueError("duplicate (source, target) edge")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("edge weights must be finite and non-negative")

        # group edges by source node
        order = np.argsort(src, kind="stable")
        self.node_count = int(node_count)
        self._src = src[order]
        self._dst = dst[order]
        self._w = w[order]
        offsets = np.zeros(node_count + 1, dtype=np.int64)
        np.add.at(offsets, self._src + 1, 1)
        self._offsets = np.cumsum(offsets)
        self.in_degree = np.bincount(dst, minlength=node_count).astype(np.int64)
        self.out_degree = np.bincount(src, minlength=node_count).astype(np.int64)
        if _normalized is None:
            _normalized = self._check_normalized()
        self._normalized = bool(_normalized)
        self._edge_cdf = None

    # -- basic views ------------------------------------------------------

    @property
    def edge_count(self) -> int:
        return int(self._src.size)

    @property
    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Iterate over edges as ``(source, target, weight)`` tuples."""
        for s, t, w in zip(self._src, self._dst, self._w):
            yield int(s), int(t), float(w)

    def edge_arrays(self):
        """Return read-only ``(sources, targets, weights)`` arrays grouped by source."""
        return self._src, self._dst, self._w

    def out_edges(self, node: int):
        """Return ``(targets, weights)`` arrays for one node's outgoing edges."""
        a, b = self._offsets[node], self._offsets[node + 1]
        return self._dst[a:b], self._w[a:b]

    def out_offsets(self):
        return self._offsets

    @property
    def is_out_normalized(self) -> bool:
        """True when every node with out-edges has weights summing to 1."""
        return self._normalized

    def _check_normalized(self) -> bool:
        if self._src.size == 0:
            return True
        sums = np.add.reduceat(self._w, self._offsets[:-1][self.out_degree > 0])
        return bool(np.all(np.abs(sums - 1.0) <= NORMALIZATION_TOL))

    def edge_sampling_cdf(self) -> np.ndarray:
        """Per-source cumulative weight table for vectorized edge selection.

        Entry ``i`` holds ``source(i) + cumulative_weight(i)``, so the table is
        globally monotone and a walker at node ``c`` picks the edge at
        ``searchsorted(table, c + u, side="right")`` for ``u`` uniform in [0, 1).
        Requires normalized out-weights. Built lazily and cached.
        """
        if self._edge_cdf is None:
            if not self._normalized:
                raise ValueError("edge sampling requires normalized out-weights")
            cum = np.cumsum(self._w)
            # cumulative total of all edges preceding each node's segment
            before = np.concatenate(([0.0], cum))[self._offsets[:-1]]
            cdf = cum - before[self._src] + self._src
            # force exact segment ends so every query lands inside its segment
            nonempty = self.out_degree > 0
            cdf[self._offsets[1:][nonempty] - 1] = np.flatnonzero(nonempty) + 1.0
            self._edge_cdf = cdf
        return self._edge_cdf

    # -- comparisons ------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return (
            self.node_count == other.node_count
            and np.array_equal(self._src, other._src)
            and np.array_equal(self._dst, other._dst)
            and np.array_equal(self._w, other._w)
        )

    def __hash__(self):
        return hash((self.node_count, self.edge_count))

    def __repr__(self) -> str:
        return (
            f"DirectedGraph(node_count={self.node_count}, "
            f"edge_count={self.edge_count}, normalized={self._normalized})"
        )


@dataclass(frozen=True)
class RootSet:
    """A non-empty subset of nodes used for relative ranking and homing."""

    members: frozenset

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(int(m) for m in self.members))
        if not self.members:
            raise ValueError("root set must be non-empty")
        if any(m < 0 for m in self.members):
            raise ValueError("root ids must be non-negative")

    @classmethod
    def of(cls, members: Iterable[int]) -> "RootSet":
        return cls(frozenset(members))

    def validate(self, node_count: int) -> None:
        high = max(self.members)
        if high >= node_count:
            raise ValueError(f"root id {high} out of range for {node_count} nodes")

    def sorted_ids(self) -> np.ndarray:
        return np.array(sorted(self.members), dtype=np.int64)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, node: int) -> bool:
        return node in self.members


def in_capacity(psi: float, gamma: float, node_count: int) -> int:
    """Incoming-connection capacity for a single draw ``psi`` in (0, 1].

    ``floor(psi ** (-1 / (gamma - 1)))``, capped at ``node_count - 1``.
    """
    if not 0.0 < psi <= 1.0:
        raise ValueError("psi must lie in (0, 1]")
    raw = np.floor(psi ** (-1.0 / (gamma - 1.0)))
    return int(min(raw, node_count - 1))


def generate_scale_free(node_count: int, gamma: float, rng_seed) -> DirectedGraph:
    """Generate a directed scale-free graph with power-law in-degrees.

    Each node draws an incoming-connection capacity ``floor(psi**(-1/(gamma-1)))``
    with ``psi`` uniform in (0, 1], capped at ``node_count - 1``. Edges are then
    placed in rounds: every node, in a freshly shuffled order per round,
    proposes an edge to a target drawn uniformly from the nodes that still have
    spare capacity, skipping self-loops and duplicates. Rounds repeat until all
    capacities are filled or a global budget of ``50 * node_count**2`` failed
    proposals is spent. All weights start at 1.0; call
    :func:`normalize_out_weights` before ranking.

    Identical ``(node_count, gamma, rng_seed)`` always produce the same graph.
    """
    if node_count < 2:
        raise ValueError("node_count must be >= 2")
    if gamma <= 1.0:
        raise ValueError("gamma must be > 1")
    rng = np.random.default_rng(rng_seed)

    psi = 1.0 - rng.random(node_count)  # uniform on (0, 1]
    capacity = np.minimum(
        np.floor(psi ** (-1.0 / (gamma - 1.0))), node_count - 1
    ).astype(np.int64)

    in_deg = np.zeros(node_count, dtype=np.int64)
    # pool of nodes with spare capacity, with O(1) swap-removal
    pool = np.arange(node_count, dtype=np.int64)
    pool_pos = np.arange(node_count, dtype=np.int64)
    pool_size = node_count

    def pool_remove(node: int) -> None:
        nonlocal pool_size
        i = pool_pos[node]
        last = pool[pool_size - 1]
        pool[i] = last
        pool_pos[last] = i
        pool_size -= 1

    linked: set[tuple[int, int]] = set()
    sources: list[int] = []
    targets: list[int] = []
    budget = 50 * node_count * node_count
    failures = 0

    while pool_size > 0 and failures < budget:
        for s in rng.permutation(node_count):
            if pool_size == 0 or failures >= budget:
                break
            s = int(s)
            for _ in range(_ATTEMPTS_PER_ROUND):
                t = int(pool[rng.integers(pool_size)])
                if t == s or (s, t) in linked:
                    failures += 1
                    if failures >= budget:
                        break
                    continue
                linked.add((s, t))
                sources.append(s)
                targets.append(t)
                in_deg[t] += 1
                if in_deg[t] >= capacity[t]:
                    pool_remove(t)
                break

    return DirectedGraph(node_count, sources, targets)


def normalize_out_weights(graph: DirectedGraph) -> DirectedGraph:
    """Scale each node's outgoing weights into a probability distribution.

    Nodes without out-edges are left untouched. Already-normalized graphs are
    returned unchanged, which makes the operation exactly idempotent.

    Raises
    ------
    ValueError
        If some node has out-edges whose weights sum to zero.
    """
    if graph.is_out_normalized:
        return graph
    src, dst, w = graph.edge_arrays()
    offsets = graph.out_offsets()
    nonempty = graph.out_degree > 0
    sums = np.add.reduceat(w, offsets[:-1][nonempty])
    if np.any(sums <= 0.0):
        bad = int(np.flatnonzero(nonempty)[np.argmax(sums <= 0.0)])
        raise ValueError(f"node {bad} has out-edges with zero total weight")
    per_edge_sum = np.repeat(sums, graph.out_degree[nonempty])
    return DirectedGraph(
        graph.node_count, src, dst, w / per_edge_sum, _normalized=True
    )


# -- edge-list file I/O ---------------------------------------------------
#
# Format: tab-separated ``source<TAB>target<TAB>weight`` lines with integer
# node ids; the weight column is optional and defaults to 1.0. An optional
# header line ``# nodes=<n>`` carries the node count, which is required to
# round-trip graphs whose highest-numbered nodes are isolated.


def save_graph(graph: DirectedGraph, path) -> None:
    """Write a graph as a TSV edge list with a ``# nodes=`` header."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# nodes={graph.node_count}\n")
        for s, t, w in graph.edges:
            fh.write(f"{s}\t{t}\t{w!r}\n")


def load_graph(path, node_count: int | None = None) -> DirectedGraph:
    """Read a TSV edge list written by :func:`save_graph`.

    ``node_count`` falls back to the ``# nodes=`` header, then to the highest
    node id seen plus one. Malformed lines raise :class:`EdgeListFormatError`
    with the line number; duplicate edges and self-loops raise ``ValueError``.
    """
    sources: list[int] = []
    targets: list[int] = []
    weights: list[float] = []
    declared = node_count
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("nodes=") and declared is None:
                    try:
                        declared = int(body[len("nodes="):])
                    except ValueError:
                        raise EdgeListFormatError("bad node count header", lineno)
                continue
            parts = line.split("\t")
            if len(parts) not in (2, 3):
                raise EdgeListFormatError(
                    f"expected 2 or 3 tab-separated fields, got {len(parts)}", lineno
                )
            try:
                s = int(parts[0])
                t = int(parts[1])
            except ValueError:
                raise EdgeListFormatError(f"non-integer node id in {parts[:2]}", lineno)
            try:
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise EdgeListFormatError(f"bad weight {parts[2]!r}", lineno)
            sources.append(s)
            targets.append(t)
            weights.append(w)
    if declared is None:
        declared = max(max(sources, default=-1), max(targets, default=-1)) + 1
        if declared < 1:
            raise EdgeListFormatError("empty file with no node count header")
    return DirectedGraph(declared, sources, targets, weights)


def load_root_set(path) -> RootSet:
    """Read a root set from a file with one node id per line."""
    members = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                members.append(int(line))
            except ValueError:
                raise EdgeListFormatError(f"non-integer root id {line!r}", lineno)
    return RootSet.of(members)
