"""Reference implementations used as ground truth.

Plain single-threaded Python over per-vertex adjacency lists. Nothing here
reuses the engine's aggregation code.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from slfe.errors import DomainError
from slfe.graph import Graph

MAX = float(np.finfo(np.float64).max)


@dataclass(frozen=True)
class OracleResult:
    values: np.ndarray
    algorithm: str
    exact: bool = True

    def __len__(self) -> int:
        return len(self.values)

    def matches(self, other, atol: float = 1e-3) -> bool:
        other = np.asarray(other)
        if self.exact:
            return np.array_equal(self.values, other)
        return float(np.abs(self.values - other).sum()) <= atol


def _out_lists(g: Graph):
    return [list(zip(*(a.tolist() for a in g.out_edges(v)))) for v in range(g.num_vertices)]


def dijkstra(g: Graph, root: int) -> np.ndarray:
    """Binary-heap Dijkstra; unreachable vertices keep the MAX sentinel."""
    root = g.check_vertex(root)
    if g.num_edges and float(g.out_weights.min()) < 0:
        raise DomainError("Dijkstra requires non-negative weights")
    adj = _out_lists(g)
    dist = [MAX] * g.num_vertices
    dist[root] = 0.0
    heap = [(0.0, root)]
    done = [False] * g.num_vertices
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in adj[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return np.asarray(dist, dtype=np.float64)


def union_find_cc(g: Graph) -> np.ndarray:
    """Weak components, each labelled with its smallest vertex id."""
    parent = list(range(g.num_vertices))

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for u, v in zip(np.repeat(np.arange(g.num_vertices), g.out_degree).tolist(),
                    g.out_indices.tolist()):
        ru, rv = find(u), find(v)
        if ru != rv:
            # keep the smaller id as the representative
            if ru < rv:
                parent[rv] = ru
            else:
                parent[ru] = rv
    return np.asarray([find(v) for v in range(g.num_vertices)], dtype=np.int64)


class EnumerationBudgetExceeded(RuntimeError):
    pass


def widest_enumerate(g: Graph, root: int, budget: int | None = None) -> np.ndarray:
    """Max-bottleneck widths by enumerating every simple path from ``root``.

    Exponential in general. ``budget`` caps the number of path extensions;
    exceeding it raises :class:`EnumerationBudgetExceeded`.
    """
    root = g.check_vertex(root)
    adj = _out_lists(g)
    width = [0.0] * g.num_vertices
    width[root] = MAX
    on_path = [False] * g.num_vertices
    steps = [0]

    def dfs(u, bottleneck):
        on_path[u] = True
        for v, w in adj[u]:
            if on_path[v]:
                continue
            steps[0] += 1
            if budget is not None and steps[0] > budget:
                raise EnumerationBudgetExceeded
            b = min(bottleneck, w)
            if b > width[v]:
                width[v] = b
            dfs(v, b)
        on_path[u] = False

    dfs(root, MAX)
    return np.asarray(width, dtype=np.float64)


def widest_dijkstra(g: Graph, root: int) -> np.ndarray:
    """Max-bottleneck Dijkstra variant."""
    root = g.check_vertex(root)
    adj = _out_lists(g)
    width = [0.0] * g.num_vertices
    width[root] = MAX
    heap = [(-MAX, root)]
    done = [False] * g.num_vertices
    while heap:
        nb, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        b = -nb
        for v, w in adj[u]:
            cand = min(b, w)
            if cand > width[v]:
                width[v] = cand
                heapq.heappush(heap, (-cand, v))
    return np.asarray(width, dtype=np.float64)


def widest_bruteforce(g: Graph, root: int, max_enumeration_vertices: int = 32,
                      budget: int = 200_000) -> np.ndarray:
    """Path enumeration on graphs up to 32 vertices, bottleneck Dijkstra beyond.

    Small graphs with too many simple paths for ``budget`` also fall back
    to the Dijkstra variant.
    """
    if g.num_vertices <= max_enumeration_vertices:
        try:
            return widest_enumerate(g, root, budget)
        except EnumerationBudgetExceeded:
            pass
    return widest_dijkstra(g, root)


def _in_lists(g: Graph):
    return [g.in_neighbors(v).tolist() for v in range(g.num_vertices)]


def power_iteration_pr(g: Graph, iters: int, damping_base: float = 0.15,
                       damping_factor: float = 0.85) -> np.ndarray:
    """PageRank with no skipping, returning per-vertex scores.

    Stored ranks are divided by out-degree; a vertex without in-edges feeds
    its own previous stored rank into the update.
    """
    n = g.num_vertices
    ins = _in_lists(g)
    deg = g.out_degree.tolist()
    rank = [1.0 / n] * n if n else []
    for _ in range(iters):
        new = [0.0] * n
        for v in range(n):
            if ins[v]:
                s = 0.0
                for u in ins[v]:
                    s += rank[u]
            else:
                s = rank[v]
            r = damping_base + damping_factor * s
            if deg[v] > 0:
                r = r / deg[v]
            new[v] = r
        rank = new
    return np.asarray([r * d if d > 0 else r for r, d in zip(rank, deg)], dtype=np.float64)


def tunkrank_iteration(g: Graph, iters: int, p: float = 0.5) -> np.ndarray:
    """Fixed-count TunkRank iteration from all-zero influence, no skipping."""
    n = g.num_vertices
    ins = _in_lists(g)
    deg = g.out_degree.tolist()
    inf = [0.0] * n
    for _ in range(iters):
        msg = [(1.0 + p * inf[u]) / deg[u] if deg[u] > 0 else 0.0 for u in range(n)]
        new = list(inf)
        for v in range(n):
            if ins[v]:
                s = 0.0
                for u in ins[v]:
                    s += msg[u]
                new[v] = s
        inf = new
    return np.asarray(inf, dtype=np.float64)


def oracle_for(name: str, g: Graph, root: int | None = None, iters: int = 100, **params) -> OracleResult:
    root = 0 if root is None else root
    if name == "sssp":
        return OracleResult(dijkstra(g, root), "dijkstra")
    if name == "cc":
        return OracleResult(union_find_cc(g), "union_find_cc")
    if name == "wp":
        return OracleResult(widest_bruteforce(g, root), "widest_bruteforce")
    if name == "pr":
        return OracleResult(power_iteration_pr(g, iters, **params), "power_iteration_pr", exact=False)
    if name == "tr":
        return OracleResult(tunkrank_iteration(g, iters, **params), "tunkrank_iteration", exact=False)
    raise ValueError(f"no oracle for {name!r}")
