"""Command line entry point: ``sffsba {gen,infer,bench,report}``."""
import argparse
import csv
import logging
import os
import sys

from . import harness, metrics, netgen, pgn
from .search import METHODS, SearchConfig, infer_network

log = logging.getLogger("sffsba")


def _add_search_flags(p):
    p.add_argument("--gamma", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--optimum-epsilon", type=float)
    p.add_argument("--max-cardinality", type=int)


def _parser():
    parser = argparse.ArgumentParser(prog="sffsba", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a ground-truth network and a simulated matrix")
    p.add_argument("--topology", choices=netgen.TOPOLOGIES, default="BA")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--avg-k", type=float, default=2.0)
    p.add_argument("--signal-size", type=int, default=50)
    p.add_argument("--ws-rewire-p", type=float, default=0.1)
    p.add_argument("--selection-probs", type=float, nargs=3, default=list(pgn.DEFAULT_PROBS))
    p.add_argument("--source-uniform", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", default=".")

    p = sub.add_parser("infer", help="infer a network from one expression matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--method", choices=METHODS, default="SFFS-BA")
    _add_search_flags(p)
    p.add_argument("--out", help="inferred edge list (default: stdout)")
    p.add_argument("--summary", help="per-target summary CSV")
    p.add_argument("--truth", help="ground-truth edge list to score against")

    p = sub.add_parser("bench", help="run a sweep and write one CSV row per run and method")
    p.add_argument("--config", help="YAML file with ExperimentConfig fields")
    p.add_argument("--seed", type=int, required=True, help="base seed of the sweep")
    p.add_argument("--topologies", nargs="+", choices=netgen.TOPOLOGIES)
    p.add_argument("--n", type=int)
    p.add_argument("--avg-k-values", type=float, nargs="+")
    p.add_argument("--signal-sizes", type=int, nargs="+")
    p.add_argument("--methods", nargs="+", choices=METHODS)
    p.add_argument("--runs", type=int)
    p.add_argument("--ws-rewire-p", type=float)
    p.add_argument("--source-uniform", action=argparse.BooleanOptionalAction, default=None)
    _add_search_flags(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("report", help="turn a bench CSV into figure tables")
    p.add_argument("--input", required=True)
    p.add_argument("--out-dir", default=".")
    return parser


def _search_config(args):
    cfg = SearchConfig()
    for name in ("gamma", "delta", "alpha", "optimum_epsilon", "max_cardinality"):
        value = getattr(args, name)
        if value is not None:
            setattr(cfg, name, value)
    cfg.__post_init__()
    return cfg


def cmd_gen(args):
    seed_net, seed_model, seed_sim = (args.seed, args.seed + 1, args.seed + 2)
    net = netgen.generate(args.topology, args.n, args.avg_k, seed_net, rewire_p=args.ws_rewire_p)
    model = pgn.build_transition_model(net, *args.selection_probs, seed=seed_model,
                                       source_uniform=args.source_uniform)
    exps = pgn.simulate(model, args.signal_size, seed_sim)
    os.makedirs(args.out_dir, exist_ok=True)
    netgen.write_edge_list(net, os.path.join(args.out_dir, "network.tsv"))
    pgn.write_matrix(exps, os.path.join(args.out_dir, "matrix.tsv"))
    log.info("wrote %d edges and a %dx%d matrix to %s", net.n_edges, exps.n_genes,
             exps.n_times, args.out_dir)


def write_summary(inferred, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["target", "predictors", "cfv", "rounds_active"])
        for t in sorted(inferred.predictors):
            writer.writerow([t, ";".join(map(str, inferred.predictors[t])),
                             f"{inferred.values[t]:.6f}", inferred.rounds_active.get(t, 0)])


def cmd_infer(args):
    exps = pgn.read_matrix(args.matrix)
    inferred = infer_network(exps, args.method, _search_config(args))
    text = netgen.format_edge_list(inferred.to_network(exps.seed))
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.summary:
        write_summary(inferred, args.summary)
    if args.truth:
        report = metrics.score(netgen.read_edge_list(args.truth), inferred)
        print(f"tp={report.tp} fp={report.fp} fn={report.fn} ppv={report.ppv:.6f} "
              f"sensitivity={report.sensitivity:.6f} similarity={report.similarity:.6f}",
              file=sys.stderr)


def bench_config(args):
    data = {}
    if args.config:
        data = harness.load_config(args.config).to_mapping()
    data["base_seed"] = args.seed
    for name in ("topologies", "n", "avg_k_values", "signal_sizes", "methods", "runs",
                 "ws_rewire_p", "source_uniform", "gamma", "delta", "alpha",
                 "optimum_epsilon", "max_cardinality"):
        value = getattr(args, name)
        if value is not None:
            data[name] = value
    if "avg_k_values" in data:
        data["avg_k_values"] = [int(k) if float(k).is_integer() else k for k in data["avg_k_values"]]
    return harness.ExperimentConfig.from_mapping(data)


def cmd_bench(args):
    config = bench_config(args)
    log.info("running %d rows", config.n_rows())

    def progress(done, total):
        if done % 50 == 0 or done == total:
            log.info("%d/%d cells", done, total)

    rows = harness.run_experiment(config, jobs=args.jobs, progress=progress)
    harness.write_csv(rows, args.out)


def cmd_report(args):
    tables = harness.aggregate_figures(harness.read_csv(args.input))
    os.makedirs(args.out_dir, exist_ok=True)
    for name, table in tables.items():
        with open(os.path.join(args.out_dir, f"{name}.csv"), "w", newline="") as fh:
            fh.write(harness.format_table(table))


COMMANDS = {"gen": cmd_gen, "infer": cmd_infer, "bench": cmd_bench, "report": cmd_report}


def main(argv=None):
    args = _parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"sffsba {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
