"""Command-line surface: generate graphs, rank, run swarms, and reproduce sweeps.

Exit codes: 0 on success, 1 on runtime failure, 2 on usage errors. Every
stochastic command prints its effective seed (and the parameters in force) to
stderr so any run can be replayed exactly.
"""

from __future__ import annotations

import argparse
import sys

from .graph import (
    generate_scale_free,
    load_graph,
    load_root_set,
    normalize_out_weights,
    save_graph,
)
from .ranking import (
    PageRankParams,
    PriorsParams,
    indegree,
    pagerank,
    pagerank_priors,
    save_ranks,
)
from .swarm import (
    ProportionalOutDegree,
    RandomProportion,
    RootSetSeeding,
    SwarmConfig,
    SwarmStats,
    UniformPerNode,
    swarm_rank,
)
from .experiments import (
    EXPERIMENTS,
    SweepSpec,
    benchmark_speedup,
    iteration_trend_check,
    run_sweep,
)


class SystemExit2(Exception):
    """Usage error surfaced after argparse has finished."""


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _cmd_generate(args) -> int:
    _log(f"generate: nodes={args.nodes} gamma={args.gamma} seed={args.seed}")
    graph = generate_scale_free(args.nodes, args.gamma, args.seed)
    save_graph(graph, args.out)
    max_in = int(graph.in_degree.max()) if graph.node_count else 0
    print(f"nodes={graph.node_count} edges={graph.edge_count} max_in_degree={max_in}")
    return 0


def _cmd_rank(args) -> int:
    graph = normalize_out_weights(load_graph(args.graph))
    if args.algorithm == "pagerank":
        params = PageRankParams(args.dampening, args.tol, args.max_iters)
        ranks, report = pagerank(graph, params)
        _log(f"pagerank: lambda={args.dampening} iterations={report.iterations_used} "
             f"final_delta={report.final_delta:.3e} converged={report.converged}")
    elif args.algorithm == "priors":
        if args.roots is None:
            raise SystemExit2("priors ranking requires --roots")
        roots = load_root_set(args.roots)
        params = PriorsParams(args.beta, roots, args.tol, args.max_iters)
        ranks, report = pagerank_priors(graph, params)
        _log(f"priors: beta={args.beta} roots={len(roots)} "
             f"iterations={report.iterations_used} "
             f"final_delta={report.final_delta:.3e} converged={report.converged}")
    else:
        ranks = indegree(graph)
        _log("indegree: exact tally")
    save_ranks(ranks, args.out)
    print(f"wrote {len(ranks)} scores to {args.out}")
    return 0


def _build_seeding(args):
    if args.seeding == "uniform":
        return UniformPerNode(args.alpha)
    if args.seeding == "outdegree":
        return ProportionalOutDegree(args.alpha)
    if args.seeding == "random":
        if args.phi is None:
            raise SystemExit2("random seeding requires --phi")
        return RandomProportion(args.phi, args.alpha)
    if args.roots is None:
        raise SystemExit2("roots seeding requires --roots")
    return RootSetSeeding(load_root_set(args.roots), args.alpha)


def _cmd_swarm(args) -> int:
    graph = normalize_out_weights(load_graph(args.graph))
    try:
        seeding = _build_seeding(args)
        config = SwarmConfig(
            delta=args.delta, beta=args.beta, seeding=seeding,
            iterations=args.iters, theta_death=args.theta, rng_seed=args.seed,
        )
    except ValueError as exc:
        raise SystemExit2(str(exc))
    _log(f"swarm: delta={args.delta} beta={args.beta} seeding={seeding} "
         f"iters={args.iters} theta={args.theta} seed={args.seed}")
    ranks, stats = swarm_rank(graph, config, workers=args.workers)
    save_ranks(ranks, args.out)
    _log(SwarmStats.CSV_HEADER)
    _log(stats.to_csv_row())
    if args.stats_out:
        with open(args.stats_out, "w", encoding="utf-8") as fh:
            fh.write(SwarmStats.CSV_HEADER + "\n" + stats.to_csv_row() + "\n")
    print(f"wrote {len(ranks)} scores to {args.out}")
    return 0


def _cmd_experiment(args) -> int:
    name = args.name.upper()
    out = args.out or f"{name}.csv"
    _log(f"experiment: {name} trials={args.trials} nodes={args.nodes} "
         f"gamma={args.gamma} seed={args.seed}")
    if name == "SPEEDUP":
        report = benchmark_speedup(
            node_count=args.nodes, gamma=args.gamma, trials=args.trials,
            rng_seed=args.seed,
        )
        report.write_csv(out)
        print(f"measured_ratio={report.measured_ratio:.3f} "
              f"theoretical={report.theoretical:.3f} trials={report.trial_count}")
        return 0
    if name == "TREND":
        gammas = [float(g) for g in args.gammas.split(",")]
        table = iteration_trend_check(
            gammas, node_count=args.nodes, trials=args.trials, rng_seed=args.seed
        )
        import csv as _csv

        with open(out, "w", newline="", encoding="utf-8") as fh:
            writer = _csv.DictWriter(
                fh, fieldnames=["gamma", "reference_iterations",
                                "swarm_iterations", "ratio"])
            writer.writeheader()
            writer.writerows(table)
        for row in table:
            print(f"gamma={row['gamma']}: reference_iterations="
                  f"{row['reference_iterations']:.2f} "
                  f"swarm_iterations={row['swarm_iterations']}")
        return 0
    spec = SweepSpec(
        experiment=name, node_count=args.nodes, gamma=args.gamma,
        trials=args.trials, rng_seed=args.seed,
    )
    result = run_sweep(spec, parallel=args.parallel)
    result.write_csv(out)
    errors = sum(1 for row in result.rows if row[-1])
    print(f"wrote {len(result.rows)} rows to {out} ({errors} error rows)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmrank",
        description="Graph influence ranking: exact references and a particle-swarm simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a scale-free graph")
    gen.add_argument("--nodes", type=int, required=True, help="number of nodes")
    gen.add_argument("--gamma", type=float, default=2.5,
                     help="power-law exponent for in-degree capacities (default 2.5)")
    gen.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    gen.add_argument("--out", required=True, help="output TSV edge list")
    gen.set_defaults(func=_cmd_generate)

    rank = sub.add_parser("rank", help="compute an exact reference ranking")
    rank.add_argument("algorithm", choices=["pagerank", "priors", "indegree"])
    rank.add_argument("--graph", required=True, help="input TSV edge list")
    rank.add_argument("--lambda", dest="dampening", type=float, default=0.15,
                      help="dampening factor: share of influence spread uniformly "
                           "each step (default 0.15)")
    rank.add_argument("--beta", type=float, default=0.15,
                      help="back-probability of jumping to the root set (default 0.15)")
    rank.add_argument("--roots", help="root set file, one node id per line")
    rank.add_argument("--tol", type=float, default=1e-8,
                      help="absolute L1 convergence tolerance (default 1e-8)")
    rank.add_argument("--max-iters", type=int, default=200,
                      help="iteration cap (default 200)")
    rank.add_argument("--out", required=True, help="output CSV of node_id,score")
    rank.set_defaults(func=_cmd_rank)

    swarm = sub.add_parser("swarm", help="rank by particle-swarm simulation")
    swarm.add_argument("--graph", required=True, help="input TSV edge list")
    swarm.add_argument("--delta", type=float, default=0.15,
                       help="per-step energy decay factor (default 0.15)")
    swarm.add_argument("--beta", type=float, default=0.0,
                       help="per-step probability of teleporting home (default 0)")
    swarm.add_argument("--seeding", choices=["uniform", "roots", "random", "outdegree"],
                       default="uniform", help="initial particle placement")
    swarm.add_argument("--alpha", type=int, default=1,
                       help="particles per seeded node (default 1)")
    swarm.add_argument("--phi", type=float,
                       help="fraction of nodes seeded under random seeding, in (0,1]")
    swarm.add_argument("--roots", help="root set file for roots seeding")
    swarm.add_argument("--iters", type=int, required=True,
                       help="number of propagation steps")
    swarm.add_argument("--theta", type=float, default=1e-8,
                       help="energy death threshold (default 1e-8)")
    swarm.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    swarm.add_argument("--workers", type=int, default=1,
                       help="parallel particle workers (default 1: deterministic mode)")
    swarm.add_argument("--out", required=True, help="output CSV of node_id,score")
    swarm.add_argument("--stats-out", help="optional CSV file for the run stats row")
    swarm.set_defaults(func=_cmd_swarm)

    exp = sub.add_parser("experiment", help="reproduce a sweep, benchmark, or trend study")
    exp.add_argument("name", choices=list(EXPERIMENTS) + ["SPEEDUP", "TREND"],
                     type=str.upper)
    exp.add_argument("--trials", type=int, default=10,
                     help="trials per grid point (default 10)")
    exp.add_argument("--nodes", type=int, default=1000,
                     help="graph size per trial (default 1000)")
    exp.add_argument("--gamma", type=float, default=2.5,
                     help="power-law exponent (default 2.5)")
    exp.add_argument("--gammas", default="2.0,2.5,3.0",
                     help="comma-separated gammas for TREND (default 2.0,2.5,3.0)")
    exp.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    exp.add_argument("--parallel", action="store_true",
                     help="run trials across processes")
    exp.add_argument("--out", help="output CSV path (default <NAME>.csv)")
    exp.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit2 as exc:
        parser.exit(2, f"{parser.prog}: error: {exc}\n")
    except BrokenPipeError:
        return 1
    except Exception as exc:  # noqa: BLE001 - surface as exit code 1
        print(f"swarmrank: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
