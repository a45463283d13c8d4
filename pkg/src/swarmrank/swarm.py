"""Particle swarm propagation: energy deposits, decay, homing, and death.

A swarm is a population of walkers placed on the graph by a seeding strategy.
Each propagation step every live particle

1. deposits its current energy onto the node it occupies,
2. decays its energy by the configured factor,
3. either teleports home (with the back-probability) or follows a
   weight-sampled outgoing edge; a particle on a node with no outgoing edges
   is destroyed.

Death handling: a particle whose energy after decaying could not survive one
further decay (``energy * (1 - delta) <= theta_death``) is retired at the end
of the step, with its energy pinned to ``theta_death``. Retiring on the
look-ahead rather than on the raw comparison fixes the boundary so that a
particle with ``delta = 0.15`` and the default threshold makes exactly 113
deposits; see ``tests/test_swarm.py``. Dead particles stay in the list but
never act again.

Runs are reproducible: with the same graph and config (seed included) the
energy field is bitwise identical, whether assembled through
:func:`swarm_rank` or through :func:`seed_particles` plus :func:`propagate`.
Seeding and propagation use independent streams derived from the one
configured seed. Per iteration the propagation stream is consumed as one
back-selection draw per live particle in index order, then one edge draw per
moving particle in index order.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass
from typing import Union

import numpy as np

from .graph import DirectedGraph, RootSet
from .ranking import RankVector

__all__ = [
    "Particle",
    "SwarmConfig",
    "UniformPerNode",
    "RootSetSeeding",
    "RandomProportion",
    "ProportionalOutDegree",
    "EnergyField",
    "SwarmStats",
    "seed_particles",
    "propagate",
    "swarm_rank",
    "walker_indegree_estimate",
]

DEFAULT_DEATH_THRESHOLD = 1e-8


@dataclass
class Particle:
    """One walker: energy, decay factor, home node, back-probability, position."""

    energy: float
    decay: float
    home: int
    back_probability: float
    current: int
    alive: bool = True


@dataclass(frozen=True)
class UniformPerNode:
    """``alpha`` particles on every node."""

    alpha: int = 1

    def __post_init__(self):
        if self.alpha < 1:
            raise ValueError("alpha must be >= 1")


@dataclass(frozen=True)
class RootSetSeeding:
    """``per_root_count`` particles on each root, homed to that root."""

    roots: RootSet
    per_root_count: int = 1

    def __post_init__(self):
        if self.per_root_count < 1:
            raise ValueError("per_root_count must be >= 1")


@dataclass(frozen=True)
class RandomProportion:
    """``alpha`` particles on each node of a random subset of size ``floor(phi * n)``."""

    phi: float
    alpha: int = 1

    def __post_init__(self):
        if not 0.0 < self.phi <= 1.0:
            raise ValueError("phi must lie in (0, 1]")
        if self.alpha < 1:
            raise ValueError("alpha must be >= 1")


@dataclass(frozen=True)
class ProportionalOutDegree:
    """``alpha * out_degree`` particles on every node."""

    alpha: int = 1

    def __post_init__(self):
        if self.alpha < 1:
            raise ValueError("alpha must be >= 1")


Seeding = Union[UniformPerNode, RootSetSeeding, RandomProportion, ProportionalOutDegree]


@dataclass
class SwarmConfig:
    """Propagation parameters shared by every particle in a run."""

    delta: float
    beta: float
    seeding: Seeding
    iterations: int
    theta_death: float = DEFAULT_DEATH_THRESHOLD
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError("delta must lie in [0, 1]")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.theta_death <= 0.0:
            raise ValueError("theta_death must be positive")


@dataclass
class EnergyField:
    """Accumulated per-node energy plus deposit bookkeeping.

    ``deposit_steps`` counts every deposit performed; ``deposit_counts`` holds
    the per-particle tally, index-aligned with the seeded particle list.
    """

    energies: np.ndarray
    deposit_steps: int
    deposit_counts: np.ndarray

    def to_rank_vector(self) -> RankVector:
        return RankVector(self.energies).normalize()


@dataclass
class SwarmStats:
    """Run summary emitted next to a swarm ranking."""

    particles_seeded: int
    particles_dead: int
    deposit_steps: int

    CSV_HEADER = "particles_seeded,particles_dead,deposit_steps"

    def to_csv_row(self) -> str:
        return f"{self.particles_seeded},{self.particles_dead},{self.deposit_steps}"


def _seeding_rng(config: SwarmConfig) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=config.rng_seed, spawn_key=(0,))
    )


def _propagation_rng(config: SwarmConfig, worker: int | None = None):
    key = (1,) if worker is None else (1, worker)
    return np.random.default_rng(
        np.random.SeedSequence(entropy=config.rng_seed, spawn_key=key)
    )


def _seed_home_nodes(graph: DirectedGraph, config: SwarmConfig) -> np.ndarray:
    """Home node per particle, ascending; the array core of every strategy."""
    n = graph.node_count
    seeding = config.seeding
    if isinstance(seeding, UniformPerNode):
        return np.repeat(np.arange(n, dtype=np.int64), seeding.alpha)
    if isinstance(seeding, RootSetSeeding):
        seeding.roots.validate(n)
        return np.repeat(seeding.roots.sorted_ids(), seeding.per_root_count)
    if isinstance(seeding, RandomProportion):
        count = int(np.floor(seeding.phi * n))
        if count < 1:
            raise ValueError(
                f"phi={seeding.phi} selects no nodes on a {n}-node graph"
            )
        chosen = np.sort(_seeding_rng(config).choice(n, size=count, replace=False))
        return np.repeat(chosen, seeding.alpha)
    if isinstance(seeding, ProportionalOutDegree):
        homes = np.repeat(np.arange(n, dtype=np.int64),
                          seeding.alpha * graph.out_degree)
        if homes.size == 0:
            raise ValueError("graph has no out-edges to seed proportionally")
        return homes
    raise TypeError(f"unknown seeding strategy {seeding!r}")


def seed_particles(graph: DirectedGraph, config: SwarmConfig) -> list[Particle]:
    """Place particles per the configured strategy.

    Every particle starts alive with energy 1.0 at its home node. Particle
    order is deterministic: seed nodes ascending, ``alpha`` copies each.
    """
    return [
        Particle(1.0, config.delta, int(h), config.beta, int(h))
        for h in _seed_home_nodes(graph, config)
    ]


def _propagate_kernel(graph, energy, current, home, alive, config, rng, field,
                      deposit_counts):
    """Shared propagation loop; mutates all array arguments in place.

    Works on compacted copies holding live particles only (ascending original
    index) and writes final states back to the full arrays; dead particles
    drop out of the working set instead of being re-masked every step.
    """
    one_minus_delta = 1.0 - config.delta
    theta = config.theta_death
    beta = config.beta
    cdf = graph.edge_sampling_cdf()
    _, dst, _ = graph.edge_arrays()
    out_degree = graph.out_degree
    deposit_steps = 0

    index = np.flatnonzero(alive)
    live_energy = energy[index]
    live_current = current[index]
    live_home = home[index]

    def bury(mask):
        """Record deaths for the masked working-set entries, then compact."""
        nonlocal index, live_energy, live_current, live_home
        dead = index[mask]
        energy[dead] = theta
        current[dead] = live_current[mask]
        alive[dead] = False
        keep = ~mask
        index = index[keep]
        live_energy = live_energy[keep]
        live_current = live_current[keep]
        live_home = live_home[keep]

    for _ in range(config.iterations):
        if index.size == 0:
            break
        # deposit, then decay
        field += np.bincount(live_current, weights=live_energy,
                             minlength=field.size)
        deposit_counts[index] += 1
        deposit_steps += index.size
        live_energy *= one_minus_delta
        # retire particles that could not survive another decay
        spent = live_energy * one_minus_delta <= theta
        if spent.any():
            bury(spent)
            if index.size == 0:
                break
        # back-selection for every live particle, in index order
        draws = rng.random(index.size)
        if beta > 0.0:
            going_home = draws < beta
            live_current[going_home] = live_home[going_home]
            moving = ~going_home
            positions = live_current[moving]
        else:
            moving = None
            positions = live_current
        if positions.size:
            stranded = out_degree[positions] == 0
            if stranded.any():
                if moving is None:
                    bury(stranded)
                    positions = live_current
                else:
                    full_mask = np.zeros(index.size, dtype=bool)
                    full_mask[np.flatnonzero(moving)[stranded]] = True
                    bury(full_mask)
                    moving = moving[~full_mask]
                    positions = live_current[moving]
                if index.size == 0:
                    break
            if positions.size:
                picks = np.searchsorted(
                    cdf, positions + rng.random(positions.size), side="right"
                )
                if moving is None:
                    live_current = dst[picks]
                else:
                    live_current[moving] = dst[picks]

    energy[index] = live_energy
    current[index] = live_current
    return deposit_steps


def _run_swarm(graph, energy, current, home, alive, config, workers):
    """Dispatch the kernel serially or across particle chunks."""
    field = np.zeros(graph.node_count)
    deposit_counts = np.zeros(energy.size, dtype=np.int64)
    if energy.size == 0:
        return EnergyField(field, 0, deposit_counts)
    if workers <= 1:
        deposit_steps = _propagate_kernel(
            graph, energy, current, home, alive, config,
            _propagation_rng(config), field, deposit_counts,
        )
        return EnergyField(field, int(deposit_steps), deposit_counts)

    bounds = np.linspace(0, energy.size, workers + 1).astype(np.int64)
    chunk_fields = [np.zeros(graph.node_count) for _ in range(workers)]

    def run_chunk(i: int) -> int:
        a, b = bounds[i], bounds[i + 1]
        return _propagate_kernel(
            graph, energy[a:b], current[a:b], home[a:b], alive[a:b],
            config, _propagation_rng(config, i), chunk_fields[i],
            deposit_counts[a:b],
        )

    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        deposit_steps = sum(pool.map(run_chunk, range(workers)))
    for chunk in chunk_fields:
        field += chunk
    return EnergyField(field, int(deposit_steps), deposit_counts)


def propagate(graph: DirectedGraph, particles: list[Particle],
              config: SwarmConfig, workers: int = 1) -> EnergyField:
    """Run the swarm for ``config.iterations`` steps and collect the field.

    The particle objects are updated in place with their final energy,
    position and liveness. With ``workers > 1`` the population is split into
    contiguous chunks driven by independent RNG streams and accumulated into
    per-worker fields that are summed at the end; results are deterministic
    for a fixed ``(rng_seed, workers)`` but differ bitwise from the
    single-worker stream.
    """
    if not graph.is_out_normalized:
        raise ValueError("propagation requires normalized out-weights")
    energy = np.array([p.energy for p in particles], dtype=np.float64)
    current = np.array([p.current for p in particles], dtype=np.int64)
    home = np.array([p.home for p in particles], dtype=np.int64)
    alive = np.array([p.alive for p in particles], dtype=bool)
    energy_field = _run_swarm(graph, energy, current, home, alive, config, workers)
    for i, p in enumerate(particles):
        p.energy = float(energy[i])
        p.current = int(current[i])
        p.alive = bool(alive[i])
    return energy_field


def swarm_rank(graph: DirectedGraph, config: SwarmConfig,
               workers: int = 1) -> tuple[RankVector, SwarmStats]:
    """Seed, propagate, and normalize the energy field into a ranking.

    Equivalent to :func:`seed_particles` followed by :func:`propagate`, but
    skips materializing the particle objects.
    """
    if not graph.is_out_normalized:
        raise ValueError("propagation requires normalized out-weights")
    home = _seed_home_nodes(graph, config)
    energy = np.ones(home.size, dtype=np.float64)
    current = home.copy()
    alive = np.ones(home.size, dtype=bool)
    energy_field = _run_swarm(graph, energy, current, home, alive, config, workers)
    stats = SwarmStats(
        particles_seeded=int(home.size),
        particles_dead=int(home.size - alive.sum()),
        deposit_steps=energy_field.deposit_steps,
    )
    return energy_field.to_rank_vector(), stats


def walker_indegree_estimate(graph: DirectedGraph, alpha: int = 1,
                             rng_seed: int = 0) -> RankVector:
    """Estimate in-degree influence by one-step walker counting.

    Seeds ``alpha * out_degree`` walkers on every node, propagates a single
    step, and counts where the walkers landed. Each outgoing edge is traversed
    ``alpha`` times in expectation, so the expected arrival count at a node is
    exactly ``alpha`` times its in-degree.
    """
    config = SwarmConfig(
        delta=0.0, beta=0.0, seeding=ProportionalOutDegree(alpha),
        iterations=1, rng_seed=rng_seed,
    )
    home = _seed_home_nodes(graph, config)
    energy = np.ones(home.size, dtype=np.float64)
    current = home.copy()
    alive = np.ones(home.size, dtype=bool)
    _run_swarm(graph, energy, current, home, alive, config, workers=1)
    arrivals = np.bincount(current, minlength=graph.node_count).astype(np.float64)
    return RankVector(arrivals).normalize()
