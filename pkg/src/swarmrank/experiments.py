"""Correlation sweeps, the analytic speedup model, and wall-clock benchmarks.

Every sweep is reproducible from its spec: per grid point and trial a fresh
graph, reference ranking and swarm run are derived from
``SeedSequence(rng_seed, spawn_key=(point, trial))``, so grid points and
trials can execute in any order or concurrently without changing results.
All wall-clock figures time rank computation only, never graph generation or
file I/O.
"""

from __future__ import annotations

import concurrent.futures
import csv
import time
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .graph import DirectedGraph, RootSet, generate_scale_free, normalize_out_weights
from .ranking import (
    PageRankParams,
    PriorsParams,
    RankVector,
    indegree,
    pagerank,
    pagerank_priors,
)
from .swarm import (
    DEFAULT_DEATH_THRESHOLD,
    RandomProportion,
    RootSetSeeding,
    SwarmConfig,
    UniformPerNode,
    swarm_rank,
)

__all__ = [
    "EXPERIMENTS",
    "SweepSpec",
    "ExperimentResult",
    "SpeedupReport",
    "pearson",
    "run_sweep",
    "theoretical_speedup",
    "benchmark_speedup",
    "iteration_trend_check",
]

EXPERIMENTS = ("FIG1A", "FIG1B", "FIG2A", "FIG2B", "FIG3A", "FIG3B", "FIG4")

# combined optimum located by the seeding/iteration trade-off study
OPTIMAL_PHI = 0.45
OPTIMAL_ITERATIONS = 8


def pearson(a, b) -> float:
    """Pearson product-moment correlation of two equal-length vectors.

    Raises ``ValueError`` for vectors shorter than 2 or with zero variance.
    """
    x = np.asarray(a.scores if isinstance(a, RankVector) else a, dtype=np.float64)
    y = np.asarray(b.scores if isinstance(b, RankVector) else b, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("inputs must be 1-d vectors of equal length")
    if x.size < 2:
        raise ValueError("correlation needs at least two samples")
    dx = x - x.mean()
    dy = y - y.mean()
    vx = float(dx @ dx)
    vy = float(dy @ dy)
    if vx == 0.0 or vy == 0.0:
        raise ValueError("correlation is undefined for a constant vector")
    return float(dx @ dy) / float(np.sqrt(vx) * np.sqrt(vy))


def _scale_grid(points: int = 21) -> tuple[float, ...]:
    return tuple(np.round(np.linspace(0.005, 0.995, points), 6))


@dataclass
class SweepSpec:
    """One experiment's grids, graph recipe, and seed.

    Leaving a grid as ``None`` picks the experiment's default. ``alpha`` is
    the per-node particle count for uniform and random seeding; root seeding
    uses ``per_root`` particles on each of a ``roots_fraction`` random subset.
    """

    experiment: str
    node_count: int = 1000
    gamma: float = 2.5
    trials: int = 10
    rng_seed: int = 0
    dampening_grid: tuple = None
    delta_grid: tuple = None
    beta_grid: tuple = None
    phi_grid: tuple = None
    iteration_grid: tuple = None
    alpha: int = None
    roots_fraction: float = 0.10
    per_root: int = 10
    dampening: float = 0.15
    tolerance: float = 1e-8
    max_iterations: int = 200

    def __post_init__(self):
        self.experiment = self.experiment.upper()
        if self.experiment not in EXPERIMENTS:
            raise ValueError(
                f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}"
            )
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.node_count < 2:
            raise ValueError("node_count must be >= 2")

    def grid_points(self) -> list[dict]:
        """Expand the spec into a list of per-point parameter dicts."""
        exp = self.experiment
        if exp == "FIG1A":
            lams = self.dampening_grid or _scale_grid()
            return [{"dampening": float(l)} for l in lams]
        if exp == "FIG1B":
            deltas = self.delta_grid or _scale_grid()
            alpha = self.alpha or 10
            return [{"delta": float(d), "alpha": alpha} for d in deltas]
        if exp == "FIG2A":
            deltas = self.delta_grid or _scale_grid(10)
            lams = self.dampening_grid or _scale_grid(10)
            alpha = self.alpha or 10
            return [
                {"delta": float(d), "dampening": float(l), "alpha": alpha}
                for d in deltas
                for l in lams
            ]
        if exp == "FIG2B":
            bs = self.beta_grid or tuple(np.round(np.linspace(0.1, 1.0, 10), 6))
            return [
                {"beta_swarm": float(bp), "beta_reference": float(br)}
                for bp in bs
                for br in bs
            ]
        if exp == "FIG3A":
            ts = self.iteration_grid or tuple(range(1, 26))
            alpha = self.alpha or 1
            return [{"iterations": int(t), "alpha": alpha} for t in ts]
        if exp == "FIG3B":
            phis = self.phi_grid or tuple(np.round(np.linspace(0.02, 1.0, 50), 6))
            alpha = self.alpha or 1
            return [{"phi": float(p), "alpha": alpha} for p in phis]
        if exp == "FIG4":
            phis = self.phi_grid or tuple(np.round(np.arange(1, 51) * 0.01, 6))
            ts = self.iteration_grid or tuple(range(1, 26))
            alpha = self.alpha or 1
            return [
                {"phi": float(p), "iterations": int(t), "alpha": alpha}
                for p in phis
                for t in ts
            ]
        raise AssertionError(exp)


@dataclass
class ExperimentResult:
    """Sweep output: one row per grid point per trial, CSV-serializable."""

    experiment: str
    columns: list
    rows: list = dataclass_field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([row[i] for row in self.rows], dtype=object)

    def mean_pearson(self, **point_params) -> float:
        """Mean correlation over trials at one grid point."""
        keep = []
        ci = self.columns.index("pearson")
        for row in self.rows:
            record = dict(zip(self.columns, row))
            if record.get("error"):
                continue
            if all(np.isclose(record[k], v) for k, v in point_params.items()):
                keep.append(row[ci])
        if not keep:
            raise KeyError(f"no rows match {point_params}")
        return float(np.mean(keep))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.columns)
            writer.writerows(self.rows)

    @classmethod
    def read_csv(cls, experiment: str, path) -> "ExperimentResult":
        with open(path, "r", newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            columns = next(reader)
            rows = []
            for raw in reader:
                row = []
                for name, value in zip(columns, raw):
                    if name in ("trial", "iterations", "alpha", "reference_iterations"):
                        row.append(int(value) if value else None)
                    elif name == "error":
                        row.append(value)
                    else:
                        row.append(float(value) if value else None)
                rows.append(tuple(row))
        return cls(experiment, columns, rows)


def _trial_seeds(rng_seed: int, point: int, trial: int):
    """Independent integer seeds for (graph, swarm, roots) of one trial."""
    state = np.random.SeedSequence(
        entropy=rng_seed, spawn_key=(point, trial)
    ).generate_state(3, np.uint64)
    return int(state[0]), int(state[1]), int(state[2])


def _decay_lifetime(delta: float, theta: float) -> int:
    """Closed-form deposit count of a never-stranded particle."""
    if delta <= 0.0:
        return np.iinfo(np.int64).max
    if delta >= 1.0:
        return 1
    return int(np.floor(np.log(theta) / np.log(1.0 - delta)))


def _run_point_trial(spec: SweepSpec, point_index: int, params: dict, trial: int):
    """Generate a fresh graph, rank it both ways, and correlate."""
    graph_seed, swarm_seed, aux_seed = _trial_seeds(spec.rng_seed, point_index, trial)
    graph = normalize_out_weights(
        generate_scale_free(spec.node_count, spec.gamma, graph_seed)
    )
    exp = spec.experiment
    started = time.perf_counter()

    if exp == "FIG1A":
        reference = indegree(graph)
        ranks, report = pagerank(
            graph,
            PageRankParams(params["dampening"], spec.tolerance, spec.max_iterations),
        )
        corr = pearson(ranks, reference)
        return corr, report.iterations_used, time.perf_counter() - started

    if exp == "FIG1B":
        reference = indegree(graph)
        iterations = min(
            _decay_lifetime(params["delta"], DEFAULT_DEATH_THRESHOLD),
            spec.max_iterations,
        )
        config = SwarmConfig(
            delta=params["delta"], beta=0.0,
            seeding=UniformPerNode(params["alpha"]),
            iterations=max(iterations, 1), rng_seed=swarm_seed,
        )
        ranks, stats = swarm_rank(graph, config)
        return pearson(ranks, reference), config.iterations, time.perf_counter() - started

    if exp == "FIG2A":
        reference, report = pagerank(
            graph,
            PageRankParams(params["dampening"], spec.tolerance, spec.max_iterations),
        )
        config = SwarmConfig(
            delta=params["delta"], beta=0.0,
            seeding=UniformPerNode(params["alpha"]),
            iterations=report.iterations_used, rng_seed=swarm_seed,
        )
        ranks, stats = swarm_rank(graph, config)
        return pearson(ranks, reference), report.iterations_used, time.perf_counter() - started

    if exp == "FIG2B":
        rng = np.random.default_rng(aux_seed)
        size = max(1, int(np.floor(spec.roots_fraction * spec.node_count)))
        roots = RootSet.of(rng.choice(spec.node_count, size=size, replace=False))
        reference, report = pagerank_priors(
            graph,
            PriorsParams(params["beta_reference"], roots, spec.tolerance,
                         spec.max_iterations),
        )
        config = SwarmConfig(
            delta=0.0, beta=params["beta_swarm"],
            seeding=RootSetSeeding(roots, spec.per_root),
            iterations=report.iterations_used, rng_seed=swarm_seed,
        )
        ranks, stats = swarm_rank(graph, config)
        return pearson(ranks, reference), report.iterations_used, time.perf_counter() - started

    # FIG3A / FIG3B / FIG4 correlate a constrained swarm against converged
    # global ranks at the spec's dampening value
    reference, report = pagerank(
        graph, PageRankParams(spec.dampening, spec.tolerance, spec.max_iterations)
    )
    if exp == "FIG3A":
        seeding = UniformPerNode(params["alpha"])
        iterations = params["iterations"]
    elif exp == "FIG3B":
        seeding = RandomProportion(params["phi"], params["alpha"])
        iterations = report.iterations_used
    else:  # FIG4
        seeding = RandomProportion(params["phi"], params["alpha"])
        iterations = params["iterations"]
    config = SwarmConfig(
        delta=spec.dampening, beta=0.0, seeding=seeding,
        iterations=iterations, rng_seed=swarm_seed,
    )
    ranks, stats = swarm_rank(graph, config)
    return pearson(ranks, reference), report.iterations_used, time.perf_counter() - started


def _sweep_task(task):
    """Run one (grid point, trial) pair; module-level so it pickles."""
    spec, i, params, param_names, trial = task
    try:
        corr, iters, wall = _run_point_trial(spec, i, params, trial)
        return (i, trial, tuple(params[k] for k in param_names),
                corr, iters, wall, "")
    except Exception as exc:  # noqa: BLE001 - error rows must not abort
        return (i, trial, tuple(params[k] for k in param_names),
                None, None, None, f"{type(exc).__name__}: {exc}")


def run_sweep(spec: SweepSpec, parallel: bool = False,
              max_workers: int | None = None) -> ExperimentResult:
    """Execute every (grid point, trial) pair of a sweep.

    A failing trial contributes an error row instead of aborting the sweep.
    Rows come back sorted by (grid point, trial) regardless of execution
    order, so serial and parallel runs produce identical results.
    """
    points = spec.grid_points()
    param_names = list(points[0].keys())
    columns = param_names + ["trial", "pearson", "reference_iterations",
                             "wall_time", "error"]
    tasks = [
        (spec, i, params, param_names, trial)
        for i, params in enumerate(points)
        for trial in range(spec.trials)
    ]

    if parallel:
        with concurrent.futures.ProcessPoolExecutor(max_workers=max_workers) as pool:
            outcomes = list(pool.map(_sweep_task, tasks, chunksize=8))
    else:
        outcomes = [_sweep_task(task) for task in tasks]

    outcomes.sort(key=lambda o: (o[0], o[1]))
    result = ExperimentResult(spec.experiment, columns)
    for i, trial, values, corr, iters, wall, err in outcomes:
        result.rows.append(values + (trial, corr, iters, wall, err))
    return result


def theoretical_speedup(edge_count: float, reference_iterations: float,
                        phi: float, node_count: float, alpha: float,
                        swarm_iterations: float) -> float:
    """Analytic cost ratio of edge-based ranking to the particle swarm.

    ``edge_count * reference_iterations`` work for the reference versus
    ``phi * node_count * alpha`` particles seeded once and propagated for
    ``swarm_iterations`` steps.
    """
    if edge_count <= 0 or reference_iterations <= 0:
        raise ValueError("edge_count and reference_iterations must be positive")
    if phi <= 0 or node_count <= 0 or alpha <= 0:
        raise ValueError("phi, node_count and alpha must be positive")
    if swarm_iterations < 0:
        raise ValueError("swarm_iterations must be >= 0")
    particles = phi * node_count * alpha
    denominator = particles + particles * swarm_iterations
    if denominator == 0:
        raise ValueError("zero-cost swarm configuration")
    return (edge_count * reference_iterations) / denominator


@dataclass
class SpeedupReport:
    """Measured versus theoretical speedup over repeated trials."""

    trial_count: int
    measured_ratio: float
    theoretical: float
    mean_edge_count: float
    mean_reference_iterations: float
    phi: float
    alpha: int
    swarm_iterations: int
    rows: list = dataclass_field(default_factory=list)

    COLUMNS = ("trial", "edge_count", "reference_iterations",
               "reference_seconds", "swarm_seconds", "ratio", "pearson")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.COLUMNS)
            writer.writerows(self.rows)
            writer.writerow([])
            writer.writerow(["measured_ratio", self.measured_ratio])
            writer.writerow(["theoretical", self.theoretical])


def benchmark_speedup(node_count: int = 1000, gamma: float = 2.5,
                      trials: int = 10, rng_seed: int = 0,
                      dampening: float = 0.15,
                      phi: float = OPTIMAL_PHI,
                      alpha: int = 1,
                      swarm_iterations: int = OPTIMAL_ITERATIONS) -> SpeedupReport:
    """Time converged global ranking against the optimized swarm.

    Fresh graphs per trial; only the two rank computations are timed. The
    theoretical ratio is evaluated from the measured mean edge count and mean
    convergence iterations.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rows = []
    for trial in range(trials):
        graph_seed, swarm_seed, _ = _trial_seeds(rng_seed, 0, trial)
        graph = normalize_out_weights(
            generate_scale_free(node_count, gamma, graph_seed)
        )
        graph.edge_sampling_cdf()  # build sampling tables outside the timers

        started = time.perf_counter()
        reference, report = pagerank(graph, PageRankParams(dampening))
        reference_seconds = time.perf_counter() - started

        config = SwarmConfig(
            delta=dampening, beta=0.0,
            seeding=RandomProportion(phi, alpha),
            iterations=swarm_iterations, rng_seed=swarm_seed,
        )
        started = time.perf_counter()
        ranks, stats = swarm_rank(graph, config)
        swarm_seconds = time.perf_counter() - started

        rows.append((
            trial, graph.edge_count, report.iterations_used,
            reference_seconds, swarm_seconds,
            reference_seconds / swarm_seconds, pearson(ranks, reference),
        ))

    mean_edges = float(np.mean([r[1] for r in rows]))
    mean_iters = float(np.mean([r[2] for r in rows]))
    return SpeedupReport(
        trial_count=trials,
        measured_ratio=float(np.mean([r[5] for r in rows])),
        theoretical=theoretical_speedup(
            mean_edges, mean_iters, phi, node_count, alpha, swarm_iterations
        ),
        mean_edge_count=mean_edges,
        mean_reference_iterations=mean_iters,
        phi=phi, alpha=alpha, swarm_iterations=swarm_iterations,
        rows=rows,
    )


def iteration_trend_check(gammas, node_count: int = 1000, trials: int = 10,
                          rng_seed: int = 0, target: float = 0.95,
                          max_swarm_iterations: int = 25,
                          dampening: float = 0.15) -> list[dict]:
    """Per gamma: smallest swarm iteration count whose mean correlation with
    converged global ranks reaches ``target``, reported beside the reference
    convergence iterations.

    Each (gamma, trial) pair owns one fresh graph reused across candidate
    iteration counts.
    """
    table = []
    for gi, gamma in enumerate(gammas):
        if not 1.0 < gamma:
            raise ValueError("gamma must be > 1")
        prepared = []
        for trial in range(trials):
            graph_seed, swarm_seed, _ = _trial_seeds(rng_seed, gi, trial)
            graph = normalize_out_weights(
                generate_scale_free(node_count, gamma, graph_seed)
            )
            reference, report = pagerank(graph, PageRankParams(dampening))
            prepared.append((graph, reference, report.iterations_used, swarm_seed))
        mean_reference = float(np.mean([p[2] for p in prepared]))
        minimal = None
        for t in range(1, max_swarm_iterations + 1):
            corrs = []
            for graph, reference, _, swarm_seed in prepared:
                config = SwarmConfig(
                    delta=dampening, beta=0.0, seeding=UniformPerNode(1),
                    iterations=t, rng_seed=swarm_seed,
                )
                ranks, _ = swarm_rank(graph, config)
                corrs.append(pearson(ranks, reference))
            if float(np.mean(corrs)) >= target:
                minimal = t
                break
        table.append({
            "gamma": float(gamma),
            "reference_iterations": mean_reference,
            "swarm_iterations": minimal,
            "ratio": None if minimal is None else minimal / mean_reference,
        })
    return table
