"""Command-line entry point: ``jtlearn <subcommand> ...``.

Exit codes: 0 success, 2 configuration error, 3 numeric failure (matrix not
positive definite), 4 problem size above the limit.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import baselines, experiment
from .dual import SpaceEntropies, solve
from .entropy import DiscreteDataset, EntropyOracle, NotPositiveDefinite, load_entropy_table
from .forest import InfeasibleCount
from .rounding import DecomposableGraph, gaussian_loglikelihood, graph_entropy, loglikelihood, round_tau
from .space import SpaceTooLarge, build_space
from .synthetic import D_PRIME, make_ground_truth

EXIT_CONFIG, EXIT_NUMERIC, EXIT_SIZE = 2, 3, 4


class ConfigError(Exception):
    pass


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_oracle(args) -> EntropyOracle:
    given = [x for x in (args.entropies, args.data, args.cov) if x]
    if len(given) != 1:
        raise ConfigError("give exactly one of --entropies, --data, --cov")
    if args.entropies:
        return load_entropy_table(args.entropies, n=args.n)
    if args.data:
        return EntropyOracle.from_data(DiscreteDataset.from_csv(args.data))
    return EntropyOracle.from_covariance(np.loadtxt(args.cov, ndmin=2))


def _add_input(p):
    p.add_argument("--entropies", help="entropy table JSON")
    p.add_argument("--data", help="CSV of integer codes with a header row")
    p.add_argument("--cov", help="whitespace-separated covariance matrix")
    p.add_argument("--n", type=int, help="number of variables (entropy tables only)")


def _add_solver(p):
    p.add_argument("--step-a", type=float, default=None, help="step constant a")
    p.add_argument("--iters", type=int, default=2000, help="supergradient iterations T")


def cmd_gen(args):
    out = _out_dir(args)
    gt = make_ground_truth(args.shape, args.n, args.treewidth, args.d, args.seeds, args.dprime)
    np.savetxt(out / "covariance.txt", gt.sigma, fmt="%.17g")
    gt.graph.dump(out / "graph.json", cost=gt.optimal_entropy)
    space = build_space(args.n, args.treewidth)
    gt.oracle().precompute(space).dump(out / "entropies.json")
    print(f"optimal entropy {gt.optimal_entropy:.12g} written to {out}")


def cmd_entropies(args):
    oracle = _load_oracle(args)
    space = build_space(oracle.n, args.treewidth)
    oracle.precompute(space).dump(args.out)


def cmd_learn(args):
    oracle = _load_oracle(args)
    space = build_space(oracle.n, args.treewidth)
    oracle.precompute(space).freeze()
    result = experiment.learn(space, oracle, args.iters, args.step_a, box=args.box_relaxed)
    out = _out_dir(args)
    result.trace.write_jsonl(out / "trace.jsonl")
    result.graph.dump(out / "graph.json", cost=result.cost)
    with open(out / "tau_avg.json", "w") as fh:
        json.dump(result.trace.tau_avg.tolist(), fh)
    print(f"best dual {result.trace.best_Q:.12g} (iteration {result.trace.best_t}), "
          f"rounded cost {result.cost:.12g}")


def cmd_round(args):
    with open(args.tau) as fh:
        tau = np.array(json.load(fh), dtype=float)
    space = build_space(args.n, args.treewidth)
    fallback = None
    oracle = None
    if args.entropies:
        oracle = load_entropy_table(args.entropies, n=args.n)
        fallback = baselines.clique_mi(space, oracle)
    rounded = round_tau(space, tau, fallback_scores=fallback)
    cost = graph_entropy(rounded.graph, oracle) if oracle else None
    rounded.graph.dump(args.out, cost=cost)


def cmd_baseline(args):
    oracle = _load_oracle(args)
    if args.method == "chowliu":
        graph = baselines.chow_liu(oracle, oracle.n)
    else:
        space = build_space(oracle.n, args.treewidth)
        graph = baselines.greedy_mi(space, oracle)
    cost = graph_entropy(graph, oracle)
    graph.dump(args.out, cost=cost)
    print(f"{args.method} cost {cost:.12g}")


def _seeds(text: str) -> tuple:
    if "," in text or "-" in text:
        seeds = []
        for part in text.split(","):
            lo, _, hi = part.partition("-")
            seeds.extend(range(int(lo), int(hi) + 1) if hi else [int(lo)])
        return tuple(seeds)
    return tuple(range(int(text)))


def cmd_experiment(args):
    config = experiment.ExperimentConfig(
        shape=args.shape, n=args.n, k=args.treewidth, d=tuple(args.d), d_prime=args.dprime,
        seeds=_seeds(args.seeds), solver=experiment.SolverConfig(args.iters, args.step_a))
    rows = experiment.run_experiment(config)
    out = _out_dir(args)
    with open(out / "results.json", "w") as fh:
        json.dump(experiment.rows_to_json(rows, config), fh, indent=1, sort_keys=True)
    print(experiment.format_table(rows, 1e3 if args.scale else 1.0))


def cmd_eval(args):
    with open(args.graph) as fh:
        graph = DecomposableGraph.from_dict(json.load(fh))
    if args.cov:
        cov = np.loadtxt(args.cov, ndmin=2)
        report = {"expected_loglik": gaussian_loglikelihood(graph, cov)}
    elif args.data:
        data = DiscreteDataset.from_csv(args.data)
        train, test = data.split(args.split, args.seed) if args.split < 1 else (data, None)
        ll, floor = loglikelihood(graph, train)
        report = {"train_loglik": ll, "floor": floor}
        if test is not None:
            report["test_loglik"], _ = loglikelihood(graph, train, test)
    else:
        raise ConfigError("eval needs --data or --cov")
    print(json.dumps(report, indent=1))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jtlearn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic decomposable Gaussian")
    p.add_argument("--shape", choices=["chain", "star"], default="chain")
    p.add_argument("--n", type=int, default=9)
    p.add_argument("--treewidth", type=int, default=2)
    p.add_argument("--d", type=float, default=8.0)
    p.add_argument("--dprime", type=int, default=D_PRIME)
    p.add_argument("--seeds", type=int, default=0, help="RNG seed")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("entropies", help="precompute an entropy table")
    _add_input(p)
    p.add_argument("--treewidth", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_entropies)

    p = sub.add_parser("learn", help="solve the relaxation and round")
    _add_input(p)
    _add_solver(p)
    p.add_argument("--treewidth", type=int, required=True)
    p.add_argument("--box-relaxed", action="store_true",
                   help="drop the hyperforest constraint from the clique subproblem")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("round", help="round averaged clique selections")
    p.add_argument("--tau", required=True, help="JSON list of averaged clique selections")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--treewidth", type=int, required=True)
    p.add_argument("--entropies", help="entropy table for the cost and fallback order")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_round)

    p = sub.add_parser("baseline", help="Chow-Liu tree or greedy mutual-information cliques")
    _add_input(p)
    p.add_argument("--method", choices=["chowliu", "greedy"], required=True)
    p.add_argument("--treewidth", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("experiment", help="chain/star benchmark table")
    p.add_argument("--shape", choices=["chain", "star"], default="chain")
    p.add_argument("--n", type=int, default=9)
    p.add_argument("--treewidth", type=int, default=2)
    p.add_argument("--d", type=float, nargs="+", default=[1, 2, 4, 8, 16, 32])
    p.add_argument("--dprime", type=int, default=D_PRIME)
    p.add_argument("--seeds", default="10", help="count, or list like 0-4,7")
    p.add_argument("--scale", action="store_true", help="print differences times 1e3")
    _add_solver(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("eval", help="log-likelihood of a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--data")
    p.add_argument("--cov")
    p.add_argument("--split", type=float, default=1.0, help="training fraction")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except SpaceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except NotPositiveDefinite as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, InfeasibleCount, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
