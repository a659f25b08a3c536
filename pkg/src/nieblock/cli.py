"""Command-line pipeline: precompute, gendata, train, solve, eval, bench, oracle.

Every stochastic command is fully determined by --seed; reruns with the same
flags produce byte-identical output files regardless of --threads. Node ids
on the command line refer to the compacted ids of the loaded graph (the file
order after id compaction). Seed-set flags take either a comma-separated
list ("0,5,9") or @FILE where the file holds whitespace- or comma-separated
ids.
"""

import argparse
import json
import sys
import time

import numpy as np

from . import bench as bench_mod
from .cascade import Instance, estimate_blocked, exact_blocked
from .datagen import SamplerConfig, generate_dataset, load_dataset, save_dataset
from .errors import NieblockError
from .graph import (
    AUTO_SAMPLED_THRESHOLD,
    assign_degree_probabilities,
    load_edge_list,
    load_node_stats,
    load_or_compute_stats,
)
from .ioutil import atomic_write_text, dumps_deterministic
from .model import TrainConfig, load_model, save_model, train
from .optimize import ExactEstimator, McsEstimator, NieEstimator, celf, evaluate_solution


def _load_graph(path):
    graph = load_edge_list(path)
    if not graph.has_all_probabilities():
        graph = assign_degree_probabilities(graph)
    return graph


def _parse_id_list(text):
    """'0,5,9' or '@file' (commas or whitespace inside) -> sorted id tuple."""
    if text is None:
        return ()
    if text.startswith("@"):
        with open(text[1:], "r", encoding="utf-8") as fh:
            text = fh.read()
    parts = [p for chunk in text.split(",") for p in chunk.split()]
    return tuple(int(p) for p in parts if p)


def _derived_seed(*parts) -> int:
    return int(np.random.SeedSequence(tuple(int(p) for p in parts)).generate_state(1)[0])


def _emit(payload: dict, out_path):
    text = dumps_deterministic(payload) + "\n"
    if out_path:
        atomic_write_text(out_path, text)
    else:
        sys.stdout.write(text)


def cmd_precompute(args) -> int:
    graph = _load_graph(args.graph)
    mode = args.closeness_mode
    if mode == "auto":
        mode = "sampled" if graph.node_count > AUTO_SAMPLED_THRESHOLD else "exact"
    kwargs = {"closeness_mode": mode, "seed": args.seed}
    if mode == "sampled":
        kwargs["sample_size"] = args.sample_size or min(graph.node_count, 1024)
    t0 = time.perf_counter()
    load_or_compute_stats(graph, args.out, **kwargs)
    print(
        f"stats for {graph.node_count} nodes / {graph.edge_count} edges "
        f"({mode} closeness) ready in {time.perf_counter() - t0:.2f}s -> {args.out}"
    )
    return 0


def cmd_gendata(args) -> int:
    graph = _load_graph(args.graph)
    stats = None
    if not args.no_features:
        stats = load_or_compute_stats(graph, args.stats)
    config = SamplerConfig(
        rho=args.rho,
        pareto_shape=args.pareto_shape,
        pareto_scale=args.pareto_scale,
        k_cap=args.k_cap,
    )
    t0 = time.perf_counter()
    dataset = generate_dataset(
        graph,
        count=args.count,
        label_r=args.label_r,
        config=config,
        master_seed=args.seed,
        h_radius=args.h,
        stats=stats,
        with_features=not args.no_features,
        threads=args.threads,
    )
    save_dataset(dataset, args.out)
    labels = [rec.label for rec in dataset.records]
    print(
        f"{len(labels)} records in {time.perf_counter() - t0:.1f}s, "
        f"label mean {sum(labels) / len(labels):.3f} -> {args.out}"
    )
    return 0


def cmd_train(args) -> int:
    dataset = load_dataset(args.dataset)
    config = TrainConfig(
        batch_size=args.batch_size,
        learning_rate=args.lr,
        max_epochs=args.max_epochs,
        patience=args.patience,
        val_fraction=args.val_fraction,
    )
    t0 = time.perf_counter()
    model, report = train(dataset, config, seed=args.seed)
    save_model(model, args.out)
    print(
        f"trained {report.epochs_run} epochs in {time.perf_counter() - t0:.1f}s "
        f"(best epoch {report.best_epoch}, "
        f"validation mse {report.validation_mse[report.best_epoch - 1]:.4f}"
        f"{', early stop' if report.stopped_early else ''}) -> {args.out}"
    )
    return 0


def cmd_solve(args) -> int:
    graph = _load_graph(args.graph)
    s_f = _parse_id_list(args.sf)
    if not s_f:
        raise ValueError("--sf must name at least one node")
    k = args.k if args.k is not None else len(s_f)
    if args.estimator == "nie":
        if not args.model:
            raise ValueError("--estimator nie requires --model")
        model = load_model(args.model)
        stats = load_or_compute_stats(graph, args.stats)
        estimator = NieEstimator(model, stats)
    elif args.estimator == "mcs":
        estimator = McsEstimator(args.mcs_r, _derived_seed(args.seed, 0))
    else:
        estimator = ExactEstimator()
    t0 = time.perf_counter()
    trace = celf(estimator, graph, s_f, k)
    solve_seconds = time.perf_counter() - t0
    predicted = estimator.evaluate(graph, Instance(s_f, trace.chosen))
    mcs = evaluate_solution(graph, s_f, trace.chosen, args.eval_r, _derived_seed(args.seed, 1))
    _emit(
        {
            "s_f": list(s_f),
            "s_t": [int(v) for v in trace.chosen],
            "k": int(k),
            "estimator": args.estimator,
            "predicted": predicted,
            "mcs_value": mcs.mean,
            "mcs_replications": mcs.replications,
        },
        args.out,
    )
    print(
        f"solved k={k} in {solve_seconds:.2f}s with {trace.evaluations_used} evaluations; "
        f"mcs value {mcs.mean:.3f}",
        file=sys.stderr,
    )
    return 0


def cmd_eval(args) -> int:
    graph = _load_graph(args.graph)
    instance = Instance(_parse_id_list(args.sf), _parse_id_list(args.st))
    est = estimate_blocked(graph, instance, args.r, args.seed)
    _emit(
        {
            "mean": est.mean,
            "std_error": est.std_error,
            "replications": est.replications,
            "master_seed": est.master_seed,
        },
        args.out,
    )
    return 0


def cmd_bench(args) -> int:
    graph = _load_graph(args.graph)
    problems = []
    with open(args.problems, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                problems.append(_parse_id_list(line))
    if not problems:
        raise ValueError(f"no problems found in {args.problems}")
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    model = load_model(args.model) if args.model else None
    stats = load_node_stats(args.stats, graph) if args.stats else None
    kwargs = dict(
        model=model,
        stats=stats,
        mcs_r=args.mcs_r,
        eval_r=args.eval_r,
        seed=args.seed,
        k=args.k,
    )
    if args.mode == "time-to-target":
        target = "nie_final" if args.target is None else args.target
        report = bench_mod.run_time_to_target(
            graph, problems, methods, target, budget_seconds=args.budget, **kwargs
        )
    else:
        report = bench_mod.run_quality_within_budget(
            graph, problems, methods, args.budget, **kwargs
        )
    bench_mod.write_report(report, args.out)
    print(f"{len(report.rows)} rows -> {args.out}")
    return 0


def cmd_oracle(args) -> int:
    graph = _load_graph(args.graph)
    instance = Instance(_parse_id_list(args.sf), _parse_id_list(args.st))
    value = exact_blocked(graph, instance, args.max_edges)
    print(repr(value))
    return 0


def _add_common(parser, *, graph=False, seed=True, out=False, out_required=False, h=False, threads=False):
    if graph:
        parser.add_argument("--graph", required=True, help="edge-list file")
        parser.add_argument("--stats", help="node-stats cache file")
        parser.add_argument("--model", help="trained model file")
    if seed:
        parser.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    if h:
        parser.add_argument("--h", type=int, default=2, help="hop radius for features (default 2)")
    if threads:
        parser.add_argument("--threads", type=int, default=1, help="worker processes (default 1)")
    if out:
        parser.add_argument("--out", required=out_required, help="output file" + ("" if out_required else " (default stdout)"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nieblock",
        description="Influence blocking maximization: simulate, train a surrogate, pick true seeds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("precompute", help="compute and cache per-node statistics")
    _add_common(p, graph=True, out=True, out_required=True)
    p.add_argument("--closeness-mode", choices=["auto", "exact", "sampled"], default="auto")
    p.add_argument("--sample-size", type=int, help="targets for sampled closeness")
    p.set_defaults(func=cmd_precompute)

    p = sub.add_parser("gendata", help="sample instances and label them by simulation")
    _add_common(p, graph=True, out=True, out_required=True, h=True, threads=True)
    p.add_argument("--count", type=int, required=True, help="number of records")
    p.add_argument("--label-r", type=int, default=1000, help="replications per label (default 1000)")
    p.add_argument("--rho", type=float, default=0.1, help="high-impact pool fraction (default 0.1)")
    p.add_argument("--pareto-shape", type=float, default=9.0)
    p.add_argument("--pareto-scale", type=float, default=10.0)
    p.add_argument("--k-cap", type=int, default=64, help="false seed count cap (default 64)")
    p.add_argument("--no-features", action="store_true", help="skip cached feature columns")
    p.set_defaults(func=cmd_gendata)

    p = sub.add_parser("train", help="fit the surrogate model on a dataset")
    _add_common(p, out=True, out_required=True)
    p.add_argument("--dataset", required=True, help="JSON-lines dataset from gendata")
    p.add_argument("--batch-size", type=int, default=512)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--max-epochs", type=int, default=200)
    p.add_argument("--patience", type=int, default=10)
    p.add_argument("--val-fraction", type=float, default=0.1)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("solve", help="pick true seeds with CELF")
    _add_common(p, graph=True, out=True)
    p.add_argument("--sf", required=True, help="false seeds: comma list or @file")
    p.add_argument("--k", type=int, help="true seed budget (default |s_f|)")
    p.add_argument("--estimator", choices=["nie", "mcs", "exact"], default="nie")
    p.add_argument("--mcs-r", type=int, default=10000, help="replications inside the mcs estimator")
    p.add_argument("--eval-r", type=int, default=10000, help="replications for the final check")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("eval", help="Monte Carlo blocked influence of a given solution")
    _add_common(p, graph=True, out=True)
    p.add_argument("--sf", required=True, help="false seeds: comma list or @file")
    p.add_argument("--st", default="", help="true seeds: comma list or @file (default empty)")
    p.add_argument("--r", type=int, default=10000, help="replications (default 10000)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="compare methods across problems")
    _add_common(p, graph=True, out=True, out_required=True)
    p.add_argument("--problems", required=True, help="file with one false seed list per line")
    p.add_argument("--methods", default="nie,mcs", help="comma list from {nie,mcs}")
    p.add_argument("--mode", choices=["time-to-target", "quality"], default="quality")
    p.add_argument("--budget", type=float, default=60.0, help="seconds per method per problem")
    p.add_argument("--target", type=float, help="explicit quality target (time-to-target mode)")
    p.add_argument("--mcs-r", type=int, default=10000)
    p.add_argument("--eval-r", type=int, default=10000)
    p.add_argument("--k", type=int, help="true seed budget (default |s_f| per problem)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", help="exact blocked influence by world enumeration")
    _add_common(p, graph=True, seed=False)
    p.add_argument("--sf", required=True)
    p.add_argument("--st", default="")
    p.add_argument("--max-edges", type=int, default=20)
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NieblockError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
