"""Command-line interface.

Exit codes: 0 success, 1 internal error (including training divergence),
2 input error, 3 exact-solver budget exceeded.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields
from pathlib import Path

from . import __version__
from .canon import CANON_MAX_VERTICES
from .graph import GraphError, read_graph

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
ALGO_CHOICES = {"exact": "exact", "greedy": "greedy-maxdeg",
                "approx2": "matching-2approx", "model": "model"}

log = logging.getLogger("obstructvc")


def _cmd_gen(args):
    from .obstructions import generate_up_to

    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        print(f"error: cannot write to {out}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    levels = generate_up_to(args.kmax, out, budget=args.budget, workers=args.workers)
    if not args.no_plots:
        from .plotting import plot_counts
        plot_counts(levels, out / "counts.png")
    incomplete = []
    for k, level in sorted(levels.items()):
        flag = "  (possibly incomplete)" if level.possibly_incomplete else ""
        print(f"k={k}: {len(level)} connected obstructions{flag}")
        if level.possibly_incomplete:
            incomplete.append(k)
    return EXIT_BUDGET if incomplete else EXIT_OK


def _cmd_solve(args):
    from .solvers import UnsolvedError, solve

    g = read_graph(args.graph)
    if args.algo == "model":
        from .s2v import greedy_cover, load_params
        result = greedy_cover(g, load_params(args.model))
    else:
        try:
            result = solve(g, ALGO_CHOICES[args.algo], budget=args.budget)
        except UnsolvedError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BUDGET
    labels = g.labels()
    print(f"size: {result.size}")
    print("cover: " + " ".join(str(labels[v]) for v in result.cover))
    print(f"algorithm: {result.algorithm}")
    print(f"optimality: {result.optimality}")
    return EXIT_OK


def _cmd_train(args):
    from .s2v import save_params
    from .train import (TrainingDiverged, build_pool, parse_config, train,
                        write_history_csv, write_manifest)

    config = parse_config(Path(args.config).read_text())
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    pool = build_pool(config)

    def progress(row):
        log.info("epoch %d: validation mean %.3f, loss %.4f",
                 row["epoch"], row["validation_mean_cover"], row["loss_mean"])

    status = EXIT_OK
    try:
        best, report = train(config, pool=pool, progress=progress)
    except TrainingDiverged as exc:
        print(f"error: {exc}; writing partial outputs", file=sys.stderr)
        best, report, status = exc.best, exc.report, EXIT_INTERNAL
    save_params(best, out / "model.s2v")
    write_history_csv(report, out / "history.csv")
    write_manifest(config, report, out / "manifest.txt", len(pool))
    if not args.no_plots and report.history:
        from .plotting import plot_history
        exact = [r.exact for r in report.graphs if r.exact is not None]
        ref = {"exact vc": sum(exact) / len(exact)} if exact else None
        plot_history({config.pool_mode: report.history}, out / "history.png", ref)
    print(f"epochs: {len(report.history)}")
    print(f"initial validation mean: {report.initial_validation_mean}")
    print(f"best epoch: {report.best_epoch}")
    return status


def _cmd_evaluate(args):
    from .s2v import load_params
    from .train import evaluate, write_evaluation_csv

    params = load_params(args.model)
    files = sorted(p for p in Path(args.graphs).iterdir()
                   if p.is_file() and not p.name.startswith("."))
    if not files:
        print(f"error: no graph files in {args.graphs}", file=sys.stderr)
        return EXIT_INPUT
    graphs = [read_graph(p) for p in files]
    report = evaluate(params, graphs, [p.stem for p in files], budget=args.budget)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_evaluation_csv(report, out)
    if not args.no_plots:
        from .plotting import plot_evaluation
        plot_evaluation(report, out.with_suffix(".png"))
    print(f"evaluated {len(graphs)} graphs -> {out}")
    return EXIT_OK


def _cmd_plot_history(args):
    from .plotting import plot_history
    from .train import read_history_csv

    runs = {}
    for path in args.history:
        rows = read_history_csv(path)
        label = rows[0]["pool_mode"] if rows else Path(path).stem
        if label in runs:
            label = f"{label} ({Path(path).parent.name or path})"
        runs[label] = rows
    plot_history(runs, args.out)
    return EXIT_OK


def _cmd_info(args):
    from .solvers import DEFAULT_BUDGET
    from .train import TrainConfig

    print(f"obstructvc {__version__}")
    print(f"canonical labeling cap: {CANON_MAX_VERTICES} vertices")
    print(f"default exact-solver budget: {DEFAULT_BUDGET} nodes")
    print("training defaults:")
    for f in fields(TrainConfig):
        print(f"  {f.name} = {getattr(TrainConfig, f.name, f.default)}")
    if args.graph:
        g = read_graph(args.graph)
        print(f"graph: n={g.n} m={g.m} components={len(g.components())} "
              f"max_degree={max(g.degrees(), default=0)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obstructvc",
        description="Vertex-cover obstruction sets, cover solvers, and a learned cover policy.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker processes for obstruction verification (default: 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-obstructions", help="generate connected obstruction levels 1..K")
    p.add_argument("--kmax", type=int, required=True, help="largest k to generate (>= 1)")
    p.add_argument("--out", required=True, help="output directory for .g6 levels and counts.csv")
    p.add_argument("--budget", type=int, default=2_000_000,
                   help="exact-solver node budget per solve (default: 2000000)")
    p.add_argument("--no-plots", action="store_true", help="skip counts.png")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("solve", help="compute a vertex cover of one graph")
    p.add_argument("--graph", required=True,
                   help="edge list, DIMACS 'p edge' file, or single-graph .g6 file")
    p.add_argument("--algo", choices=sorted(ALGO_CHOICES), default="exact",
                   help="exact | greedy (max degree) | approx2 (matching) | model (default: exact)")
    p.add_argument("--model", help="model checkpoint, required with --algo model")
    p.add_argument("--budget", type=int, default=2_000_000,
                   help="exact-solver node budget (default: 2000000)")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("train", help="train a cover policy from a key=value config file")
    p.add_argument("--config", required=True, help="config file (see README for keys)")
    p.add_argument("--out", default=".", help="output directory (default: current directory)")
    p.add_argument("--no-plots", action="store_true", help="skip history.png")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="compare model, Alg1, Alg2 and exact vc on a directory of graphs")
    p.add_argument("--model", required=True, help="model checkpoint")
    p.add_argument("--graphs", required=True, help="directory of graph files")
    p.add_argument("--out", default="evaluation.csv", help="output CSV (default: evaluation.csv)")
    p.add_argument("--budget", type=int, default=2_000_000,
                   help="exact-solver node budget per graph (default: 2000000)")
    p.add_argument("--no-plots", action="store_true", help="skip the .png next to the CSV")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("plot-history", help="overlay one or more history.csv files in one figure")
    p.add_argument("history", nargs="+", help="history.csv files")
    p.add_argument("--out", default="history.png", help="output image (default: history.png)")
    p.set_defaults(func=_cmd_plot_history)

    p = sub.add_parser("info", help="print version, caps and defaults")
    p.add_argument("--graph", help="also print statistics of this graph file")
    p.set_defaults(func=_cmd_info)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "gen-obstructions" and args.kmax < 1:
        parser.error("--kmax must be at least 1")
    if args.command == "solve" and args.algo == "model" and not args.model:
        parser.error("--algo model requires --model FILE")
    if args.workers < 1:
        parser.error("--workers must be at least 1")

    from .train import ConfigError, PoolError

    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (GraphError, PoolError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - stable exit code for scripting
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
