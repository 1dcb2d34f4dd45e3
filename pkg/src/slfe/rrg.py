"""Redundancy-reduction guidance (RRG).

A unit-weight, synchronous label propagation from a source set records for
every vertex the last round in which some active in-neighbor reached it
(``last_iter``). Min/max applications delay a vertex's pull until the global
iteration catches up with it; arithmetic applications use it as the
stability horizon after which a vertex stops being recomputed.
"""

from __future__ import annotations

import os
import struct
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from slfe.errors import GuidanceFormatError, StaleGuidanceError, VertexError
from slfe.graph import Graph

MAGIC = b"SLFERRG1"
_HEADER = struct.Struct("<8sQQQI")
_RECORD = np.dtype([("visited", "u1"), ("last_iter", "<u4")])


def make_sources(g: Graph, roots: Iterable[int]) -> tuple[int, ...]:
    """Validate a source set: ids in range, no duplicates, non-empty."""
    roots = tuple(int(r) for r in roots)
    for r in roots:
        g.check_vertex(r)
    if len(set(roots)) != len(roots):
        raise VertexError(f"duplicate vertex in source set {roots!r}")
    if not roots and g.num_vertices:
        raise VertexError("source set must not be empty")
    return roots


def default_sources(g: Graph) -> tuple[int, ...]:
    """Sources for applications without a query root: in-degree-0 vertices, else vertex 0."""
    if g.num_vertices == 0:
        return ()
    heads = np.flatnonzero(g.in_degree == 0)
    if len(heads) == 0:
        return (0,)
    return tuple(int(v) for v in heads)


@dataclass(eq=False)
class RRGuidance:
    visited: np.ndarray
    last_iter: np.ndarray
    sources: tuple[int, ...] = ()
    fingerprint: tuple[int, int, int] | None = None
    stats: dict = field(default_factory=dict, repr=False)

    @property
    def num_vertices(self) -> int:
        return len(self.last_iter)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RRGuidance):
            return NotImplemented
        return (
            np.array_equal(self.visited, other.visited)
            and np.array_equal(self.last_iter, other.last_iter)
            and self.sources == other.sources
        )

    def records(self) -> list[tuple[bool, int]]:
        return list(zip(self.visited.tolist(), self.last_iter.tolist()))

    @classmethod
    def empty(cls, g: Graph) -> "RRGuidance":
        """Guidance that never delays anything (every ``last_iter`` is 0)."""
        n = g.num_vertices
        return cls(np.zeros(n, bool), np.zeros(n, np.uint32), (), g.fingerprint())


def generate_rrg(g: Graph, sources: Iterable[int]) -> RRGuidance:
    """Compute guidance by synchronous unit-weight propagation from ``sources``.

    Round ``it`` lets every vertex activated in round ``it - 1`` notify its
    out-neighbors: each notified vertex sets ``last_iter = it``; the ones not
    yet visited take their distance, become visited, and are active in round
    ``it + 1`` only. Sources start visited and active in round 1.
    """
    sources = make_sources(g, sources)
    n = g.num_vertices
    visited = np.zeros(n, dtype=bool)
    last_iter = np.zeros(n, dtype=np.uint32)
    dist = np.full(n, -1, dtype=np.int64)
    src_idx = np.asarray(sources, dtype=np.int64)
    visited[src_idx] = True
    dist[src_idx] = 0

    indptr, indices = g.out_indptr, g.out_indices
    active = src_idx
    it = 0
    assignments = 0
    while len(active):
        it += 1
        starts, ends = indptr[active], indptr[active + 1]
        lens = ends - starts
        total = int(lens.sum())
        if total == 0:
            break
        offsets = np.repeat(starts - np.cumsum(lens) + lens, lens)
        notified = indices[offsets + np.arange(total)]
        # ``it`` only grows, so plain assignment is the max-update
        last_iter[notified] = it
        fresh = np.unique(notified[~visited[notified]])
        visited[fresh] = True
        dist[fresh] = it
        assignments += len(fresh)
        active = fresh
    return RRGuidance(
        visited,
        last_iter,
        sources,
        g.fingerprint(),
        stats={"rounds": it, "assignments": assignments, "levels": dist},
    )


def rrg_oracle(g: Graph, sources: Iterable[int]) -> RRGuidance:
    """Independent check of :func:`generate_rrg` via BFS levels.

    ``last_iter(v) = 1 + max(level(u))`` over reachable in-neighbors ``u``.
    """
    sources = make_sources(g, sources)
    n = g.num_vertices
    level = [-1] * n
    queue = deque()
    for s in sources:
        level[s] = 0
        queue.append(s)
    out_adj = [g.out_neighbors(v).tolist() for v in range(n)]
    while queue:
        u = queue.popleft()
        for v in out_adj[u]:
            if level[v] < 0:
                level[v] = level[u] + 1
                queue.append(v)
    last_iter = np.zeros(n, dtype=np.uint32)
    for v in range(n):
        best = -1
        for u in g.in_neighbors(v).tolist():
            if level[u] >= 0 and level[u] > best:
                best = level[u]
        if best >= 0:
            last_iter[v] = best + 1
    visited = np.array([lv >= 0 for lv in level], dtype=bool)
    return RRGuidance(visited, last_iter, sources, g.fingerprint())


def save_rrg(path, guidance: RRGuidance, g: Graph | None = None) -> None:
    fp = g.fingerprint() if g is not None else guidance.fingerprint
    if fp is None:
        raise ValueError("guidance has no graph fingerprint; pass the graph")
    n, m, h = fp
    if n != guidance.num_vertices:
        raise StaleGuidanceError("guidance and graph disagree on the vertex count")
    rec = np.empty(n, dtype=_RECORD)
    rec["visited"] = guidance.visited
    rec["last_iter"] = guidance.last_iter
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, n, m, h, len(guidance.sources)))
        fh.write(np.asarray(guidance.sources, dtype="<u4").tobytes())
        fh.write(rec.tobytes())


def load_rrg(path, g: Graph | None = None) -> RRGuidance:
    """Read a guidance file; if ``g`` is given, reject guidance built for another graph."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _HEADER.size:
        raise GuidanceFormatError(f"{os.fspath(path)}: truncated header")
    magic, n, m, h, k = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise GuidanceFormatError(f"{os.fspath(path)}: bad magic {magic!r}")
    expected = _HEADER.size + 4 * k + _RECORD.itemsize * n
    if len(data) != expected:
        raise GuidanceFormatError(
            f"{os.fspath(path)}: expected {expected} bytes, found {len(data)}"
        )
    if g is not None and g.fingerprint() != (n, m, h):
        raise StaleGuidanceError(
            f"{os.fspath(path)} was generated for a different graph "
            f"({n} vertices, {m} edges)"
        )
    off = _HEADER.size
    sources = tuple(int(s) for s in np.frombuffer(data, dtype="<u4", count=k, offset=off))
    rec = np.frombuffer(data, dtype=_RECORD, count=n, offset=off + 4 * k)
    return RRGuidance(
        rec["visited"].astype(bool),
        rec["last_iter"].astype(np.uint32),
        sources,
        (n, m, h),
    )
