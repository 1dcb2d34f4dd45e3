"""Small named graphs and a seeded random-graph generator.

Shared by the test suite and the ``slfe generate`` command so both work on
the same inputs.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from slfe.graph import EdgeList, Graph, build_dual_csr
from slfe.ingest import generate_rmat, with_random_weights

# six vertices, two paths into vertex 4: the smallest case where start-late skipping saves a pull
SAMPLE_EDGES = ((0, 1, 1.0), (0, 3, 2.0), (1, 2, 1.0), (3, 4, 2.0), (2, 4, 1.0), (4, 5, 1.0))


def sample() -> Graph:
    return build_dual_csr(SAMPLE_EDGES, 6, weighted=True)


def path(n: int = 10) -> Graph:
    return build_dual_csr([(i, i + 1, 1.0) for i in range(n - 1)], n, weighted=False)


def cycle(n: int = 8) -> Graph:
    return build_dual_csr([(i, (i + 1) % n, float(1 + i % 3)) for i in range(n)], n, weighted=True)


def star(n: int = 12) -> Graph:
    return build_dual_csr([(0, i, float(i)) for i in range(1, n)], n, weighted=True)


def grid_dag(k: int = 12, seed: int = 7) -> Graph:
    """``k x k`` grid with right and down edges and random integer weights."""
    rng = np.random.default_rng(seed)
    edges = []
    for r in range(k):
        for c in range(k):
            v = r * k + c
            if c + 1 < k:
                edges.append((v, v + 1, float(rng.integers(1, 10))))
            if r + 1 < k:
                edges.append((v, v + k, float(rng.integers(1, 10))))
    return build_dual_csr(edges, k * k, weighted=True)


def layered_dag(layers: int = 8, width: int = 16, fanout: int = 3, seed: int = 11) -> Graph:
    """Each vertex links to ``fanout`` random vertices of the next layer."""
    rng = np.random.default_rng(seed)
    edges = []
    for layer in range(layers - 1):
        for i in range(width):
            u = layer * width + i
            for j in rng.choice(width, size=fanout, replace=False):
                edges.append((u, (layer + 1) * width + int(j), float(rng.integers(1, 10))))
    return build_dual_csr(edges, layers * width, weighted=True)


def multi_component() -> Graph:
    """Two cycles, a chain, and isolated vertices."""
    edges = [(0, 1, 2.0), (1, 2, 2.0), (2, 0, 2.0), (4, 5, 1.0), (5, 6, 3.0), (6, 4, 1.0),
             (8, 9, 5.0), (9, 10, 1.0)]
    return build_dual_csr(edges, 13, weighted=True)


def multigraph() -> Graph:
    """Duplicate edges with different weights plus self-loops."""
    edges = [(0, 1, 4.0), (0, 1, 1.0), (1, 1, 2.0), (1, 2, 3.0), (1, 2, 3.0), (2, 0, 1.0),
             (2, 3, 7.0), (3, 3, 1.0), (0, 3, 9.0)]
    return build_dual_csr(edges, 4, weighted=True)


def rmat_small(scale: int = 9, edge_factor: int = 8, seed: int = 3) -> Graph:
    return build_dual_csr(with_random_weights(generate_rmat(scale, edge_factor, seed), seed + 1),
                          1 << scale, weighted=True)


def rmat(scale: int = 16, edge_factor: int = 16, seed: int = 1, weighted: bool = False) -> Graph:
    edges = generate_rmat(scale, edge_factor, seed)
    if weighted:
        edges = with_random_weights(edges, seed + 1)
    return build_dual_csr(edges, 1 << scale, weighted=weighted)


FIXTURES: dict[str, Callable[[], Graph]] = {
    "sample": sample,
    "path": path,
    "cycle": cycle,
    "star": star,
    "grid": grid_dag,
    "layered": layered_dag,
    "components": multi_component,
    "multigraph": multigraph,
    "rmat9": rmat_small,
}


def fixture_root(g: Graph) -> int:
    """Highest out-degree vertex, lowest id on ties."""
    return int(np.argmax(g.out_degree)) if g.num_vertices else 0


def random_edges(rng: np.random.Generator, max_vertices: int = 256, max_avg_degree: int = 4,
                 max_weight: int = 9) -> tuple[int, EdgeList]:
    """Random directed multigraph with integer weights in ``[1, max_weight]``."""
    n = int(rng.integers(1, max_vertices + 1))
    m = int(rng.integers(0, max_avg_degree * n + 1))
    src = rng.integers(0, n, m)
    dst = rng.integers(0, n, m)
    w = rng.integers(1, max_weight + 1, m).astype(np.float64)
    return n, EdgeList(src, dst, w)


def random_graph(rng: np.random.Generator, **kwargs) -> Graph:
    n, edges = random_edges(rng, **kwargs)
    return build_dual_csr(edges, n, weighted=True)
