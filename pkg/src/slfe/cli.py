"""Command-line entry point: ``slfe run``, ``slfe compare`` and ``slfe generate``.

Graphs are read from edge-list files, or built on the fly from a spec:
``rmat:SCALE[:EDGE_FACTOR]`` (seeded by ``--seed``) or ``fixture:NAME``.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import logging
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from slfe import fixtures, oracles
from slfe.apps import APP_NAMES, MAX, ROOTED, guidance_sources, make_app
from slfe.engine import DEFAULT_DENSE_DIVISOR, Engine, EngineConfig, RunResult
from slfe.errors import SLFEError, StaleGuidanceError
from slfe.graph import Graph, build_dual_csr
from slfe.ingest import (EdgeListFormat, chunk_partition, generate_rmat, load_graph,
                         with_random_weights, write_edge_list)
from slfe.rrg import RRGuidance, default_sources, generate_rrg, load_rrg, save_rrg

log = logging.getLogger("slfe")

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class CLIError(SLFEError):
    pass


def default_threads() -> int:
    env = os.environ.get("SLFE_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise CLIError(f"SLFE_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


@dataclass
class RunConfig:
    app: str
    graph: str
    format: str = "text"
    weighted: bool = False
    root: int | None = None
    partitions: int = 1
    threads: int = 1
    rr: bool = True
    stability_epsilon: float = 0.0
    dense_divisor: float = DEFAULT_DENSE_DIVISOR
    max_iters: int = 100
    epsilon: float = 0.0
    rrg: str | None = None
    rrg_sources: str = "root"
    metrics: str | None = None
    results: str | None = None
    seed: int = 0
    oracle: bool = False

    def __post_init__(self):
        if self.app not in APP_NAMES:
            raise CLIError(f"unknown app {self.app!r}")
        for name in ("partitions", "threads", "max_iters"):
            if getattr(self, name) < 1:
                raise CLIError(f"--{name.replace('_', '-')} must be >= 1")
        if self.dense_divisor <= 0:
            raise CLIError("--dense-divisor must be positive")
        if self.stability_epsilon < 0 or self.epsilon < 0:
            raise CLIError("epsilons must be non-negative")
        if self.rrg_sources not in ("root", "shared"):
            raise CLIError("--rrg-sources must be 'root' or 'shared'")


# ---------------------------------------------------------------------- graphs

def read_graph(spec: str, fmt: str = "text", weighted: bool = False, seed: int = 0) -> Graph:
    if spec.startswith("rmat:"):
        parts = spec.split(":")[1:]
        try:
            scale = int(parts[0])
            edge_factor = int(parts[1]) if len(parts) > 1 else 16
        except (IndexError, ValueError):
            raise CLIError(f"bad RMAT spec {spec!r}; expected rmat:SCALE[:EDGE_FACTOR]") from None
        edges = generate_rmat(scale, edge_factor, seed)
        if weighted:
            edges = with_random_weights(edges, seed + 1)
        return build_dual_csr(edges, 1 << scale, weighted=weighted)
    if spec.startswith("fixture:"):
        name = spec.split(":", 1)[1]
        if name not in fixtures.FIXTURES:
            raise CLIError(f"unknown fixture {name!r}; choose from {', '.join(fixtures.FIXTURES)}")
        return fixtures.FIXTURES[name]()
    if not os.path.exists(spec):
        raise CLIError(f"graph file not found: {spec}")
    return load_graph(spec, EdgeListFormat(fmt, weighted))


def format_value(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    return "inf" if v == MAX else repr(v)


def results_text(values: np.ndarray) -> str:
    ints = np.issubdtype(values.dtype, np.integer)
    out = io.StringIO()
    for i, v in enumerate(values.tolist()):
        out.write(f"{i} {v if ints else format_value(v)}\n")
    return out.getvalue()


# ----------------------------------------------------------------------- runs

@dataclass
class RunOutcome:
    config: RunConfig
    graph: Graph
    result: RunResult
    guidance: RRGuidance | None
    timings: dict
    failures: list[str]

    @property
    def metrics(self):
        return self.result.metrics


def obtain_guidance(cfg: RunConfig, g: Graph) -> tuple[RRGuidance, float]:
    """Load the cached guidance if it matches the graph and sources, else generate it."""
    app = make_app(cfg.app, cfg.root)
    gg = app.graph_for(g)
    if cfg.app in ROOTED and cfg.rrg_sources == "root":
        sources = guidance_sources(cfg.app, g, cfg.root)
    else:
        sources = default_sources(g)
    t0 = time.perf_counter()
    if cfg.rrg and os.path.exists(cfg.rrg):
        try:
            cached = load_rrg(cfg.rrg, gg)
            if cached.sources == sources:
                return cached, time.perf_counter() - t0
            log.warning("cached guidance %s was built from other sources; regenerating", cfg.rrg)
        except StaleGuidanceError as exc:
            log.warning("%s; regenerating", exc)
    guidance = generate_rrg(gg, sources)
    if cfg.rrg:
        save_rrg(cfg.rrg, guidance, gg)
    return guidance, time.perf_counter() - t0


def self_check(cfg: RunConfig, g: Graph, res: RunResult) -> list[str]:
    """Cheap invariants: length, fixed point for min/max apps, finite scores."""
    problems = []
    n = g.num_vertices
    if len(res.values) != n:
        problems.append(f"results cover {len(res.values)} of {n} vertices")
        return problems
    if len(res.metrics) != res.state.iteration:
        problems.append("metrics row count differs from the iteration count")
    app = make_app(cfg.app, cfg.root)
    if app.family == "minmax":
        gg = app.graph_for(g)
        raw = res.raw
        if gg.num_edges:
            src = np.repeat(np.arange(n), gg.out_degree)
            cand = app.relax(raw[src], gg.out_weights)
            if app.improves(cand, raw[gg.out_indices]).any():
                problems.append("result is not a fixed point: some edge still improves")
        if cfg.app in ROOTED and n:
            expect = 0.0 if cfg.app == "sssp" else MAX
            if raw[cfg.root or 0] != expect:
                problems.append("root value changed")
    elif not np.isfinite(res.values).all():
        problems.append("non-finite scores")
    return problems


def execute(cfg: RunConfig, g: Graph | None = None) -> RunOutcome:
    timings = {}
    t0 = time.perf_counter()
    if g is None:
        g = read_graph(cfg.graph, cfg.format, cfg.weighted, cfg.seed)
    timings["load_seconds"] = time.perf_counter() - t0
    if cfg.app in ROOTED:
        cfg.root = g.check_vertex(0 if cfg.root is None else cfg.root)

    t0 = time.perf_counter()
    app = make_app(cfg.app, cfg.root)
    gg = app.graph_for(g)
    plan = chunk_partition(gg, cfg.partitions) if cfg.partitions > 1 else None
    timings["partition_seconds"] = time.perf_counter() - t0

    guidance, timings["rrg_seconds"] = obtain_guidance(cfg, g)
    timings["preprocessing_seconds"] = (timings["partition_seconds"] + timings["rrg_seconds"])

    ecfg = EngineConfig(
        threads=cfg.threads, rr=cfg.rr, dense_divisor=cfg.dense_divisor,
        max_iters=cfg.max_iters, epsilon=cfg.epsilon,
        stability_epsilon=cfg.stability_epsilon, plan=plan,
    )
    res = Engine(app, gg, guidance, ecfg).run()
    timings["execution_seconds"] = res.metrics.summary["execution_seconds"]

    failures = self_check(cfg, g, res)
    if cfg.oracle:
        iters = res.state.iteration if app.family == "arith" else 0
        ref = oracles.oracle_for(cfg.app, g, cfg.root, iters)
        if not ref.matches(res.values):
            failures.append(f"result differs from the {ref.algorithm} oracle")
    return RunOutcome(cfg, g, res, guidance, timings, failures)


def summary_lines(out: RunOutcome) -> list[str]:
    m, t = out.metrics, out.timings
    ratio = t["rrg_seconds"] / t["execution_seconds"] if t["execution_seconds"] > 0 else float("inf")
    lines = [
        f"app               {out.config.app} (rr {'on' if out.config.rr else 'off'})",
        f"vertices / edges  {out.graph.num_vertices} / {out.graph.num_edges}",
        f"iterations        {m.iterations}",
        f"computations      {m.total_computations} (pull {m.pull_computations})",
        f"skipped_by_rr     {m.total_skipped}",
        f"messages          {m.total_messages}",
        f"preprocessing_s   {t['preprocessing_seconds']:.6f} (rrg {t['rrg_seconds']:.6f})",
        f"execution_s       {t['execution_seconds']:.6f}",
        f"rrg/exec ratio    {ratio:.3f}",
    ]
    if "ec_fraction" in m.summary:
        lines.append(f"ec_fraction       {m.summary['ec_fraction']:.4f}")
    if out.config.oracle:
        lines.append(f"oracle            {'match' if not out.failures else 'MISMATCH'}")
    return lines


def cmd_run(args) -> int:
    cfg = config_from_args(args)
    out = execute(cfg)
    results = cfg.results or "results.txt"
    with open(results, "w") as fh:
        fh.write(results_text(out.result.values))
    if cfg.metrics:
        out.metrics.to_csv(cfg.metrics)
    for line in summary_lines(out):
        print(line)
    for problem in out.failures:
        print(f"self-check failed: {problem}", file=sys.stderr)
    return EXIT_FAILED if out.failures else EXIT_OK


# -------------------------------------------------------------------- compare

# keys a side of a comparison may override; app and graph must stay shared
OVERRIDABLE = {
    "rr": lambda s: parse_onoff(s),
    "threads": int,
    "partitions": int,
    "stability_epsilon": float,
    "dense_divisor": float,
    "max_iters": int,
    "epsilon": float,
    "rrg_sources": str,
}
SHARED = ("app", "graph", "format", "weighted", "root", "seed")


def parse_onoff(s: str) -> bool:
    s = s.lower()
    if s in ("on", "true", "1", "yes"):
        return True
    if s in ("off", "false", "0", "no"):
        return False
    raise CLIError(f"expected on/off, got {s!r}")


def apply_overrides(base: RunConfig, pairs: list[str]) -> RunConfig:
    changes = {}
    for pair in pairs:
        if "=" not in pair:
            raise CLIError(f"override {pair!r} is not key=value")
        key, value = pair.split("=", 1)
        key = key.strip().lstrip("-").replace("-", "_")
        if key in SHARED:
            raise CLIError(f"compare sides must share app and graph; cannot override {key!r}")
        if key not in OVERRIDABLE:
            raise CLIError(f"unknown override {key!r}; choose from {', '.join(OVERRIDABLE)}")
        changes[key] = OVERRIDABLE[key](value)
    return dataclasses.replace(base, **changes)


def compare_rows(a: RunOutcome, b: RunOutcome) -> list[tuple[str, float, float]]:
    ma, mb = a.metrics, b.metrics
    rows = [
        ("iterations", ma.iterations, mb.iterations),
        ("computations", ma.total_computations, mb.total_computations),
        ("pull_computations", ma.pull_computations, mb.pull_computations),
        ("skipped_by_rr", ma.total_skipped, mb.total_skipped),
        ("messages", ma.total_messages, mb.total_messages),
        ("runtime_s", a.timings["execution_seconds"], b.timings["execution_seconds"]),
    ]
    if "ec_fraction" in ma.summary:
        rows.append(("ec_fraction", ma.summary["ec_fraction"], mb.summary["ec_fraction"]))
    return rows


def curves_csv(a: RunOutcome, b: RunOutcome) -> str:
    ca = [s.computations for s in a.metrics]
    cb = [s.computations for s in b.metrics]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("iteration", "computations_a", "computations_b"))
    for i in range(max(len(ca), len(cb))):
        w.writerow((i + 1, ca[i] if i < len(ca) else "", cb[i] if i < len(cb) else ""))
    return buf.getvalue()


def cmd_compare(args) -> int:
    base = config_from_args(args)
    cfg_a = apply_overrides(base, args.a or [])
    cfg_b = apply_overrides(base, args.b or [])
    g = read_graph(base.graph, base.format, base.weighted, base.seed)
    a = execute(cfg_a, g)
    b = execute(cfg_b, g)
    text = curves_csv(a, b)
    if args.curves:
        with open(args.curves, "w", newline="") as fh:
            fh.write(text)
    print(f"{'metric':<18} {'a':>14} {'b':>14} {'delta(b-a)':>14}")
    for name, va, vb in compare_rows(a, b):
        if isinstance(va, float) or isinstance(vb, float):
            print(f"{name:<18} {va:>14.6f} {vb:>14.6f} {vb - va:>14.6f}")
        else:
            print(f"{name:<18} {va:>14d} {vb:>14d} {vb - va:>14d}")
    failures = a.failures + b.failures
    for problem in failures:
        print(f"self-check failed: {problem}", file=sys.stderr)
    return EXIT_FAILED if failures else EXIT_OK


# ------------------------------------------------------------------- generate

def cmd_generate(args) -> int:
    g = read_graph(args.spec, seed=args.seed, weighted=args.weighted)
    fmt = EdgeListFormat(args.format, g.weighted)
    write_edge_list(g.edges(), args.output, fmt)
    print(f"wrote {g.num_vertices} vertices, {g.num_edges} edges to {args.output}")
    return EXIT_OK


# ---------------------------------------------------------------------- parser

def add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--app", required=True, choices=APP_NAMES)
    p.add_argument("--graph", required=True,
                   help="edge-list path, rmat:SCALE[:EDGE_FACTOR] or fixture:NAME")
    p.add_argument("--format", choices=("text", "binary"), default="text")
    p.add_argument("--weighted", action="store_true", help="edge list carries a weight column")
    p.add_argument("--root", type=int, default=None, help="query root for sssp/wp (default 0)")
    p.add_argument("--partitions", type=int, default=1)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: $SLFE_THREADS, else CPU count)")
    p.add_argument("--rr", choices=("on", "off"), default="on")
    p.add_argument("--stability-epsilon", type=float, default=0.0,
                   help="tolerance of the per-vertex stability test (0 = exact equality)")
    p.add_argument("--dense-divisor", type=float, default=DEFAULT_DENSE_DIVISOR)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--epsilon", type=float, default=0.0, help="global L1 stopping threshold")
    p.add_argument("--rrg", default=None, help="guidance cache file")
    p.add_argument("--rrg-sources", choices=("root", "shared"), default="root",
                   help="rooted apps: guidance from the query root, or shared default sources")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle", action="store_true", help="also run the reference oracle and compare")


def config_from_args(args) -> RunConfig:
    threads = args.threads if args.threads is not None else default_threads()
    return RunConfig(
        app=args.app, graph=args.graph, format=args.format, weighted=args.weighted,
        root=args.root, partitions=args.partitions, threads=threads,
        rr=args.rr == "on", stability_epsilon=args.stability_epsilon,
        dense_divisor=args.dense_divisor, max_iters=args.max_iters, epsilon=args.epsilon,
        rrg=args.rrg, rrg_sources=args.rrg_sources,
        metrics=getattr(args, "metrics", None), results=getattr(args, "results", None),
        seed=args.seed, oracle=args.oracle,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slfe", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one application")
    add_run_flags(run)
    run.add_argument("--results", default=None, help="per-vertex results file (default results.txt)")
    run.add_argument("--metrics", default=None, help="per-iteration metrics CSV")
    run.set_defaults(func=cmd_run)

    cmp_ = sub.add_parser("compare", help="paired run of two configurations")
    add_run_flags(cmp_)
    cmp_.add_argument("--a", nargs="*", default=[], metavar="KEY=VALUE")
    cmp_.add_argument("--b", nargs="*", default=[], metavar="KEY=VALUE")
    cmp_.add_argument("--curves", default=None, help="per-iteration computation curves CSV")
    cmp_.set_defaults(func=cmd_compare)

    gen = sub.add_parser("generate", help="write a generated graph as an edge list")
    gen.add_argument("spec", help="rmat:SCALE[:EDGE_FACTOR] or fixture:NAME")
    gen.add_argument("-o", "--output", required=True)
    gen.add_argument("--format", choices=("text", "binary"), default="text")
    gen.add_argument("--weighted", action="store_true", help="random integer weights (rmat)")
    gen.add_argument("--seed", type=int, default=0)
    gen.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"slfe: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SLFEError, OSError, ValueError) as exc:
        print(f"slfe: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
