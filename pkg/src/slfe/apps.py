"""The five applications, written against the engine's push/pull hooks.

Min/max apps supply ``relax`` (edge candidate from a source value), the
``combine`` ufunc and the improvement test; ``push_func``/``pull_func`` are
derived from those. Arithmetic apps supply a per-source ``message``, which
the engine sums over in-neighbors, and a ``vertex_func`` applied to the sum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from slfe.engine import Engine, EngineConfig, RunResult, gather_rows
from slfe.graph import Graph
from slfe.rrg import RRGuidance, default_sources, generate_rrg

# finite stand-in for infinity; MAX + w stays MAX instead of producing inf
MAX = float(np.finfo(np.float64).max)


class MinMaxApp:
    family = "minmax"
    name = "minmax"
    combine: np.ufunc = np.minimum

    def relax(self, src_values: np.ndarray, weights: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def improves(self, new, old):
        return new < old if self.combine is np.minimum else new > old

    def push_func(self, values, g: Graph, srcs: np.ndarray):
        eidx, _ = gather_rows(g.out_indptr, srcs)
        src_rep = np.repeat(srcs, g.out_degree[srcs])
        dsts = g.out_indices[eidx]
        return src_rep, dsts, self.relax(values[src_rep], g.out_weights[eidx])

    def pull_func(self, values, g: Graph, dsts: np.ndarray) -> np.ndarray:
        """Aggregate over all in-neighbors of each destination (every dst has >= 1 in-edge)."""
        eidx, offsets = gather_rows(g.in_indptr, dsts)
        cand = self.relax(values[g.in_indices[eidx]], g.in_weights[eidx])
        return self.combine.reduceat(cand, offsets)

    def report(self, values, g: Graph) -> np.ndarray:
        return values.copy()

    def graph_for(self, g: Graph) -> Graph:
        return g


@dataclass
class SSSP(MinMaxApp):
    root: int = 0
    name = "sssp"
    combine = np.minimum

    def init(self, g: Graph):
        root = g.check_vertex(self.root)
        dist = np.full(g.num_vertices, MAX)
        dist[root] = 0.0
        active = np.zeros(g.num_vertices, dtype=bool)
        active[root] = True
        return dist, active

    def relax(self, src_values, weights):
        return np.where(src_values == MAX, MAX, src_values + weights)


@dataclass
class ConnectedComponents(MinMaxApp):
    name = "cc"
    combine = np.minimum

    def init(self, g: Graph):
        return np.arange(g.num_vertices, dtype=np.float64), np.ones(g.num_vertices, dtype=bool)

    def relax(self, src_values, weights):
        return src_values

    def graph_for(self, g: Graph) -> Graph:
        return g.symmetrized()

    def report(self, values, g):
        return values.astype(np.int64)


@dataclass
class WidestPath(MinMaxApp):
    root: int = 0
    name = "wp"
    combine = np.maximum

    def init(self, g: Graph):
        root = g.check_vertex(self.root)
        width = np.zeros(g.num_vertices)
        width[root] = MAX
        active = np.zeros(g.num_vertices, dtype=bool)
        active[root] = True
        return width, active

    def relax(self, src_values, weights):
        return np.minimum(src_values, weights)


class ArithmeticApp:
    family = "arith"
    name = "arith"

    def graph_for(self, g: Graph) -> Graph:
        return g

    def report(self, values, g: Graph) -> np.ndarray:
        return values.copy()


@dataclass
class PageRank(ArithmeticApp):
    """Ranks are stored already divided by out-degree, as the pull sums them directly."""

    damping_base: float = 0.15
    damping_factor: float = 0.85
    name = "pr"

    def init(self, g: Graph):
        n = g.num_vertices
        return np.full(n, 1.0 / n if n else 0.0), np.ones(n, dtype=bool)

    def message(self, values, g):
        return values

    def vertex_func(self, agg, g: Graph, ids):
        rank = self.damping_base + self.damping_factor * agg
        deg = g.out_degree[ids]
        return np.where(deg > 0, rank / np.maximum(deg, 1), rank)

    def report(self, values, g: Graph):
        deg = g.out_degree
        return np.where(deg > 0, values * deg, values)


@dataclass
class TunkRank(ArithmeticApp):
    """influence(v) = sum over in-neighbors u of (1 + p * influence(u)) / outdeg(u)."""

    p: float = 0.5
    name = "tr"

    def init(self, g: Graph):
        return np.zeros(g.num_vertices), np.ones(g.num_vertices, dtype=bool)

    def message(self, values, g: Graph):
        deg = g.out_degree
        return np.where(deg > 0, (1.0 + self.p * values) / np.maximum(deg, 1), 0.0)

    def vertex_func(self, agg, g, ids):
        return agg.copy()


APP_NAMES = ("sssp", "cc", "wp", "pr", "tr")
ROOTED = ("sssp", "wp")


def make_app(name: str, root: int | None = None, **params):
    if name == "sssp":
        return SSSP(root=0 if root is None else root)
    if name == "wp":
        return WidestPath(root=0 if root is None else root)
    if name == "cc":
        return ConnectedComponents()
    if name == "pr":
        return PageRank(**params)
    if name == "tr":
        return TunkRank(**params)
    raise ValueError(f"unknown app {name!r}; choose from {', '.join(APP_NAMES)}")


def guidance_sources(name: str, g: Graph, root: int | None = None) -> tuple[int, ...]:
    """Query root for rooted apps; in-degree-0 vertices (else vertex 0) otherwise."""
    if name in ROOTED:
        return (g.check_vertex(0 if root is None else root),)
    return default_sources(g)


def guidance_for(name: str, g: Graph, root: int | None = None) -> RRGuidance:
    """Default guidance for an app; CC propagates over the symmetrized graph."""
    sources = guidance_sources(name, g, root)
    app = make_app(name, root)
    return generate_rrg(app.graph_for(g), sources)


def run_app(app, g: Graph, rrg: RRGuidance | None, config: EngineConfig | None = None) -> RunResult:
    if isinstance(app, str):
        app = make_app(app)
    return Engine(app, app.graph_for(g), rrg, config).run()


def sssp(g: Graph, rrg: RRGuidance | None, root: int, config: EngineConfig | None = None) -> np.ndarray:
    return run_app(SSSP(root=root), g, rrg, config).values


def connected_components(g: Graph, rrg: RRGuidance | None, config: EngineConfig | None = None) -> np.ndarray:
    return run_app(ConnectedComponents(), g, rrg, config).values


def widest_path(g: Graph, rrg: RRGuidance | None, root: int, config: EngineConfig | None = None) -> np.ndarray:
    return run_app(WidestPath(root=root), g, rrg, config).values


def _arith_config(config, max_iters, epsilon):
    config = config or EngineConfig()
    if max_iters is not None:
        config.max_iters = max_iters
    if epsilon is not None:
        config.epsilon = epsilon
    config.__post_init__()
    return config


def pagerank(g: Graph, rrg: RRGuidance | None, damping_base: float = 0.15, damping_factor: float = 0.85,
             max_iters: int | None = None, epsilon: float | None = None,
             config: EngineConfig | None = None) -> np.ndarray:
    config = _arith_config(config, max_iters, epsilon)
    return run_app(PageRank(damping_base, damping_factor), g, rrg, config).values


def tunkrank(g: Graph, rrg: RRGuidance | None, p: float = 0.5, max_iters: int | None = None,
             epsilon: float | None = None, config: EngineConfig | None = None) -> np.ndarray:
    config = _arith_config(config, max_iters, epsilon)
    return run_app(TunkRank(p), g, rrg, config).values
