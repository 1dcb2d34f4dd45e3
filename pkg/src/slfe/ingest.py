"""Edge-list I/O, synthetic graph generation and chunk partitioning."""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass
from typing import BinaryIO, Literal

import numpy as np

from slfe.errors import DomainError, EdgeListParseError, GraphFormatError
from slfe.graph import VERTEX_DTYPE, WEIGHT_DTYPE, EdgeList, Graph, PartitionPlan, as_edge_list


@dataclass(frozen=True)
class EdgeListFormat:
    kind: Literal["text", "binary"] = "text"
    weighted: bool = False
    comment_prefix: str = "#"

    def __post_init__(self):
        if self.kind not in ("text", "binary"):
            raise ValueError(f"unknown edge-list kind {self.kind!r}")


def _binary_dtype(weighted: bool) -> np.dtype:
    fields = [("u", "<u4"), ("v", "<u4")]
    if weighted:
        fields.append(("w", "<f4"))
    return np.dtype(fields)


def _open_bytes(source) -> tuple[BinaryIO, bool]:
    if isinstance(source, (str, os.PathLike)):
        return open(source, "rb"), True
    if isinstance(source, (bytes, bytearray)):
        return io.BytesIO(source), True
    return source, False


def _parse_text(data: bytes, fmt: EdgeListFormat) -> EdgeList:
    want = 3 if fmt.weighted else 2
    src, dst, weight = [], [], []
    prefix = fmt.comment_prefix
    for lineno, raw in enumerate(data.decode("utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or (prefix and line.startswith(prefix)):
            continue
        tokens = line.split()
        if len(tokens) != want:
            raise EdgeListParseError(lineno, f"expected {want} fields, got {len(tokens)}")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise EdgeListParseError(lineno, "endpoints must be non-negative integers") from None
        if u < 0 or v < 0:
            raise EdgeListParseError(lineno, "endpoints must be non-negative integers")
        w = 1.0
        if fmt.weighted:
            try:
                w = float(tokens[2])
            except ValueError:
                raise EdgeListParseError(lineno, f"bad weight {tokens[2]!r}") from None
            if not math.isfinite(w) or w < 0:
                raise EdgeListParseError(lineno, f"weight must be a non-negative real, got {tokens[2]!r}")
        src.append(u)
        dst.append(v)
        weight.append(w)
    return EdgeList(
        np.asarray(src, dtype=VERTEX_DTYPE),
        np.asarray(dst, dtype=VERTEX_DTYPE),
        np.asarray(weight, dtype=WEIGHT_DTYPE),
    )


def _parse_binary(data: bytes, fmt: EdgeListFormat) -> EdgeList:
    dt = _binary_dtype(fmt.weighted)
    if len(data) % dt.itemsize:
        raise GraphFormatError(
            f"binary edge list length {len(data)} is not a multiple of the {dt.itemsize}-byte record"
        )
    rec = np.frombuffer(data, dtype=dt)
    if fmt.weighted:
        w = rec["w"].astype(WEIGHT_DTYPE)
        if not np.isfinite(w).all() or (w < 0).any():
            raise DomainError("binary edge list contains a negative or non-finite weight")
    else:
        w = np.ones(len(rec), dtype=WEIGHT_DTYPE)
    return EdgeList(rec["u"].astype(VERTEX_DTYPE), rec["v"].astype(VERTEX_DTYPE), w)


def parse_edge_list(source, fmt: EdgeListFormat | None = None) -> tuple[int, EdgeList]:
    """Read an edge list from a path, bytes, or binary stream.

    Returns ``(num_vertices, edges)`` where ``num_vertices`` is one past the
    largest endpoint id (0 for an empty input).
    """
    fmt = fmt or EdgeListFormat()
    fh, close = _open_bytes(source)
    try:
        data = fh.read()
    finally:
        if close:
            fh.close()
    if isinstance(data, str):
        data = data.encode("utf-8")
    edges = _parse_text(data, fmt) if fmt.kind == "text" else _parse_binary(data, fmt)
    return edges.max_vertex + 1, edges


def write_edge_list(edges, dest, fmt: EdgeListFormat | None = None) -> None:
    """Serialize edges to ``dest`` (path or binary stream) in ``fmt``."""
    fmt = fmt or EdgeListFormat()
    el = as_edge_list(edges)
    if fmt.kind == "text":
        if fmt.weighted:
            lines = [f"{u} {v} {w!r}\n" for u, v, w in el]
        else:
            lines = [f"{u} {v}\n" for u, v, _ in el]
        payload = "".join(lines).encode("utf-8")
    else:
        if len(el) and (el.src.max() >= 2**32 or el.dst.max() >= 2**32):
            raise GraphFormatError("binary edge lists hold 32-bit vertex ids")
        rec = np.empty(len(el), dtype=_binary_dtype(fmt.weighted))
        rec["u"] = el.src
        rec["v"] = el.dst
        if fmt.weighted:
            rec["w"] = el.weight
        payload = rec.tobytes()
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "wb") as fh:
            fh.write(payload)
    else:
        dest.write(payload)


def load_graph(path, fmt: EdgeListFormat | None = None) -> Graph:
    from slfe.graph import build_dual_csr

    fmt = fmt or EdgeListFormat()
    n, edges = parse_edge_list(path, fmt)
    return build_dual_csr(edges, n, weighted=fmt.weighted)


def chunk_partition(g: Graph, num_partitions: int, alpha: float = 1.0) -> PartitionPlan:
    """Split vertices into contiguous ranges balancing ``out_degree + alpha``.

    Greedy left-to-right: each partition takes vertices until it reaches the
    remaining load divided by the remaining partitions.
    """
    if num_partitions < 1:
        raise ValueError("num_partitions must be >= 1")
    if alpha < 0:
        raise DomainError("alpha must be non-negative")
    n = g.num_vertices
    load = g.out_degree.astype(np.float64) + alpha
    prefix = np.concatenate([[0.0], np.cumsum(load)])
    boundaries = [0]
    start = 0
    for p in range(num_partitions - 1):
        remaining = prefix[n] - prefix[start]
        expected = remaining / (num_partitions - p)
        # smallest end with load(start:end) >= expected
        end = int(np.searchsorted(prefix, prefix[start] + expected, side="left"))
        end = min(max(end, start), n)
        if expected > 0 and end == start and start < n:
            end = start + 1
        boundaries.append(end)
        start = end
    boundaries.append(n)
    return PartitionPlan(tuple(boundaries))


DEFAULT_RMAT_PROBABILITIES = (0.57, 0.19, 0.19, 0.05)


def generate_rmat(
    scale: int,
    edge_factor: int,
    seed: int,
    probabilities: tuple[float, float, float, float] = DEFAULT_RMAT_PROBABILITIES,
) -> EdgeList:
    """Recursive-matrix edge sampling (no noise, no permutation).

    Produces ``edge_factor * 2**scale`` unit-weight edges over ``2**scale``
    vertices; deterministic for a fixed seed.
    """
    a, b, c, d = probabilities
    if min(probabilities) < 0 or abs(a + b + c + d - 1.0) > 1e-9:
        raise DomainError(f"RMAT probabilities must be non-negative and sum to 1, got {probabilities}")
    if not 0 <= scale <= 24:
        raise DomainError("scale must be in [0, 24]")
    if edge_factor < 0:
        raise DomainError("edge_factor must be non-negative")
    n_edges = edge_factor * (1 << scale)
    rng = np.random.default_rng(seed)
    src = np.zeros(n_edges, dtype=VERTEX_DTYPE)
    dst = np.zeros(n_edges, dtype=VERTEX_DTYPE)
    cuts = np.cumsum([a, b, c])
    for bit in range(scale):
        quadrant = np.searchsorted(cuts, rng.random(n_edges), side="right")
        src |= (quadrant >= 2).astype(VERTEX_DTYPE) << bit
        dst |= (quadrant % 2).astype(VERTEX_DTYPE) << bit
    return EdgeList(src, dst, np.ones(n_edges, dtype=WEIGHT_DTYPE))


def with_random_weights(edges, seed: int, low: int = 1, high: int = 8) -> EdgeList:
    """Replace weights with integers drawn uniformly from ``[low, high]``."""
    el = as_edge_list(edges)
    rng = np.random.default_rng(seed)
    w = rng.integers(low, high + 1, size=len(el)).astype(WEIGHT_DTYPE)
    return EdgeList(el.src, el.dst, w)
