"""Immutable dual-CSR graph storage.

Every graph keeps both an out-edge and an in-edge view. Rows are sorted by
neighbor id (ties broken by weight) so that any per-vertex aggregation walks
its neighbors in the same order no matter how the edge list was supplied.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from slfe.errors import DomainError, GraphFormatError, VertexError

VERTEX_DTYPE = np.int64
WEIGHT_DTYPE = np.float64


@dataclass(frozen=True)
class EdgeList:
    """Columnar edge list: parallel ``src``, ``dst`` and ``weight`` arrays."""

    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray

    def __post_init__(self):
        if not (len(self.src) == len(self.dst) == len(self.weight)):
            raise GraphFormatError("src, dst and weight columns differ in length")

    def __len__(self) -> int:
        return len(self.src)

    def __iter__(self) -> Iterator[tuple[int, int, float]]:
        for u, v, w in zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist()):
            yield u, v, w

    def as_tuples(self) -> list[tuple[int, int, float]]:
        return list(self)

    @classmethod
    def from_tuples(cls, edges: Iterable[Sequence[float]]) -> "EdgeList":
        rows = [tuple(e) for e in edges]
        src, dst, weight = [], [], []
        for row in rows:
            if len(row) == 2:
                u, v = row
                w = 1.0
            elif len(row) == 3:
                u, v, w = row
            else:
                raise GraphFormatError(f"edge {row!r} must have 2 or 3 fields")
            src.append(u)
            dst.append(v)
            weight.append(w)
        return cls(
            np.asarray(src, dtype=VERTEX_DTYPE),
            np.asarray(dst, dtype=VERTEX_DTYPE),
            np.asarray(weight, dtype=WEIGHT_DTYPE),
        )

    @property
    def max_vertex(self) -> int:
        if len(self) == 0:
            return -1
        return int(max(self.src.max(), self.dst.max()))


def as_edge_list(edges) -> EdgeList:
    if isinstance(edges, EdgeList):
        return edges
    if isinstance(edges, np.ndarray) and edges.ndim == 2:
        src = edges[:, 0].astype(VERTEX_DTYPE)
        dst = edges[:, 1].astype(VERTEX_DTYPE)
        if edges.shape[1] >= 3:
            w = edges[:, 2].astype(WEIGHT_DTYPE)
        else:
            w = np.ones(len(edges), dtype=WEIGHT_DTYPE)
        return EdgeList(src, dst, w)
    return EdgeList.from_tuples(edges)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Directed multigraph with CSR rows for both edge directions.

    ``out_indices[out_indptr[u]:out_indptr[u+1]]`` are the destinations of
    ``u`` and ``in_indices[in_indptr[v]:in_indptr[v+1]]`` the sources of ``v``.
    """

    num_vertices: int
    out_indptr: np.ndarray
    out_indices: np.ndarray
    out_weights: np.ndarray
    in_indptr: np.ndarray
    in_indices: np.ndarray
    in_weights: np.ndarray
    weighted: bool = False
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def num_edges(self) -> int:
        return len(self.out_indices)

    @property
    def out_degree(self) -> np.ndarray:
        if "out_degree" not in self._cache:
            self._cache["out_degree"] = _frozen(np.diff(self.out_indptr))
        return self._cache["out_degree"]

    @property
    def in_degree(self) -> np.ndarray:
        if "in_degree" not in self._cache:
            self._cache["in_degree"] = _frozen(np.diff(self.in_indptr))
        return self._cache["in_degree"]

    def check_vertex(self, v) -> int:
        try:
            vi = int(v)
        except (TypeError, ValueError):
            raise VertexError(f"vertex id {v!r} is not an integer") from None
        if vi != v or not 0 <= vi < self.num_vertices:
            raise VertexError(f"vertex {v!r} not in [0, {self.num_vertices})")
        return vi

    def out_neighbors(self, v: int) -> np.ndarray:
        v = self.check_vertex(v)
        return self.out_indices[self.out_indptr[v]:self.out_indptr[v + 1]]

    def in_neighbors(self, v: int) -> np.ndarray:
        v = self.check_vertex(v)
        return self.in_indices[self.in_indptr[v]:self.in_indptr[v + 1]]

    def out_edges(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        v = self.check_vertex(v)
        lo, hi = self.out_indptr[v], self.out_indptr[v + 1]
        return self.out_indices[lo:hi], self.out_weights[lo:hi]

    def in_edges(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        v = self.check_vertex(v)
        lo, hi = self.in_indptr[v], self.in_indptr[v + 1]
        return self.in_indices[lo:hi], self.in_weights[lo:hi]

    def edges(self) -> EdgeList:
        """Flatten the out-CSR back into an edge list (sorted by src, dst)."""
        src = np.repeat(np.arange(self.num_vertices, dtype=VERTEX_DTYPE), self.out_degree)
        return EdgeList(src, self.out_indices.copy(), self.out_weights.copy())

    def in_edge_list(self) -> EdgeList:
        """Flatten the in-CSR into an edge list (sorted by dst, src)."""
        dst = np.repeat(np.arange(self.num_vertices, dtype=VERTEX_DTYPE), self.in_degree)
        return EdgeList(self.in_indices.copy(), dst, self.in_weights.copy())

    def fingerprint(self) -> tuple[int, int, int]:
        """(numVertices, numEdges, 64-bit hash of the out-CSR)."""
        if "fingerprint" not in self._cache:
            h = hashlib.blake2b(digest_size=8)
            h.update(np.int64(self.num_vertices).tobytes())
            h.update(self.out_indptr.astype("<i8").tobytes())
            h.update(self.out_indices.astype("<i8").tobytes())
            h.update(self.out_weights.astype("<f8").tobytes())
            csr_hash = int.from_bytes(h.digest(), "little")
            self._cache["fingerprint"] = (self.num_vertices, self.num_edges, csr_hash)
        return self._cache["fingerprint"]

    def symmetrized(self) -> "Graph":
        """Graph holding every edge in both directions (used for weak components)."""
        if "symmetrized" not in self._cache:
            e = self.edges()
            both = EdgeList(
                np.concatenate([e.src, e.dst]),
                np.concatenate([e.dst, e.src]),
                np.concatenate([e.weight, e.weight]),
            )
            self._cache["symmetrized"] = build_dual_csr(
                both, self.num_vertices, weighted=self.weighted
            )
        return self._cache["symmetrized"]

    def same_structure(self, other: "Graph") -> bool:
        return (
            self.num_vertices == other.num_vertices
            and self.weighted == other.weighted
            and all(
                np.array_equal(getattr(self, name), getattr(other, name))
                for name in (
                    "out_indptr", "out_indices", "out_weights",
                    "in_indptr", "in_indices", "in_weights",
                )
            )
        )

    def __repr__(self) -> str:
        return (
            f"Graph(num_vertices={self.num_vertices}, num_edges={self.num_edges}, "
            f"weighted={self.weighted})"
        )


def _csr(rows: np.ndarray, cols: np.ndarray, weights: np.ndarray, n: int):
    order = np.lexsort((weights, cols, rows))
    indptr = np.zeros(n + 1, dtype=VERTEX_DTYPE)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return (
        _frozen(indptr),
        _frozen(cols[order].astype(VERTEX_DTYPE)),
        _frozen(weights[order].astype(WEIGHT_DTYPE)),
    )


def build_dual_csr(edges, num_vertices: int | None = None, weighted: bool | None = None) -> Graph:
    """Build a :class:`Graph` from ``(src, dst[, weight])`` edges.

    ``num_vertices`` defaults to one past the largest endpoint. Duplicate
    edges and self-loops are kept. When ``weighted`` is false every weight is
    forced to 1.0; when left as ``None`` it is inferred from the data.
    """
    el = as_edge_list(edges)
    n = el.max_vertex + 1 if num_vertices is None else int(num_vertices)
    if n < 0:
        raise GraphFormatError("num_vertices must be non-negative")
    src = np.asarray(el.src, dtype=VERTEX_DTYPE)
    dst = np.asarray(el.dst, dtype=VERTEX_DTYPE)
    w = np.asarray(el.weight, dtype=WEIGHT_DTYPE)
    if len(src):
        bad = (src < 0) | (src >= n) | (dst < 0) | (dst >= n)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise GraphFormatError(
                f"edge {i} ({src[i]}, {dst[i]}) has an endpoint outside [0, {n})"
            )
        if not np.isfinite(w).all():
            raise DomainError("edge weights must be finite")
        if (w < 0).any():
            raise DomainError("edge weights must be non-negative")
    if weighted is None:
        weighted = bool(len(w)) and not np.all(w == 1.0)
    if not weighted:
        w = np.ones(len(src), dtype=WEIGHT_DTYPE)

    out_indptr, out_indices, out_weights = _csr(src, dst, w, n)
    in_indptr, in_indices, in_weights = _csr(dst, src, w, n)
    return Graph(
        num_vertices=n,
        out_indptr=out_indptr,
        out_indices=out_indices,
        out_weights=out_weights,
        in_indptr=in_indptr,
        in_indices=in_indices,
        in_weights=in_weights,
        weighted=bool(weighted),
    )


def degree_views(g: Graph, v: int) -> tuple[int, int]:
    """Return ``(in_degree, out_degree)`` of vertex ``v``."""
    v = g.check_vertex(v)
    return int(g.in_degree[v]), int(g.out_degree[v])


@dataclass(frozen=True)
class PartitionPlan:
    """Contiguous vertex ranges owned by logical nodes.

    Partition ``p`` owns ``[boundaries[p], boundaries[p+1])``.
    """

    boundaries: tuple[int, ...]

    def __post_init__(self):
        b = self.boundaries
        if len(b) < 2 or b[0] != 0:
            raise GraphFormatError(f"invalid partition boundaries {b!r}")
        if any(b[i] > b[i + 1] for i in range(len(b) - 1)):
            raise GraphFormatError(f"partition boundaries must be non-decreasing: {b!r}")

    @property
    def num_partitions(self) -> int:
        return len(self.boundaries) - 1

    @property
    def num_vertices(self) -> int:
        return self.boundaries[-1]

    def owner_of(self, v):
        """Owning partition of a vertex id (or an array of ids)."""
        b = np.asarray(self.boundaries)
        owner = np.searchsorted(b, v, side="right") - 1
        if np.ndim(owner) == 0:
            v = int(v)
            if not 0 <= v < self.num_vertices:
                raise VertexError(f"vertex {v} not covered by the plan")
            return int(owner)
        return owner

    def owners(self) -> np.ndarray:
        return np.repeat(
            np.arange(self.num_partitions), np.diff(np.asarray(self.boundaries))
        )

    def ranges(self) -> list[tuple[int, int]]:
        b = self.boundaries
        return [(b[i], b[i + 1]) for i in range(self.num_partitions)]
