"""swarmrank: exact graph influence rankings and their particle-swarm simulation."""

from .graph import (
    DirectedGraph,
    EdgeListFormatError,
    RootSet,
    generate_scale_free,
    in_capacity,
    load_graph,
    load_root_set,
    normalize_out_weights,
    save_graph,
)
from .ranking import (
    ConvergenceReport,
    PageRankParams,
    PriorsParams,
    RankVector,
    indegree,
    load_ranks,
    pagerank,
    pagerank_priors,
    save_ranks,
)
from .swarm import (
    EnergyField,
    Particle,
    ProportionalOutDegree,
    RandomProportion,
    RootSetSeeding,
    SwarmConfig,
    SwarmStats,
    UniformPerNode,
    propagate,
    seed_particles,
    swarm_rank,
    walker_indegree_estimate,
)
from .experiments import (
    ExperimentResult,
    SpeedupReport,
    SweepSpec,
    benchmark_speedup,
    iteration_trend_check,
    pearson,
    run_sweep,
    theoretical_speedup,
)

__version__ = "0.1.0"
