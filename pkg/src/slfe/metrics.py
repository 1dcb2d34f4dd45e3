"""Per-iteration run metrics and cross-partition message accounting."""

from __future__ import annotations

import csv
import enum
import io
import os
from dataclasses import dataclass, field

import numpy as np

from slfe.graph import Graph, PartitionPlan

CSV_HEADER = ("iteration", "mode", "computations", "active_vertices", "messages", "skipped_by_rr")


class Mode(str, enum.Enum):
    PUSH = "push"
    PULL = "pull"

    def __str__(self) -> str:
        return self.value


@dataclass
class StepMetrics:
    iteration: int
    mode: Mode
    computations: int = 0
    active_vertices: int = 0
    messages: int = 0
    skipped_by_rr: int = 0
    transition: bool = False
    # edges read (pull) or relaxed (push); not part of the CSV schema
    relaxations: int = 0

    def row(self) -> tuple:
        return (self.iteration, str(self.mode), self.computations,
                self.active_vertices, self.messages, self.skipped_by_rr)


@dataclass
class MetricsLog:
    steps: list[StepMetrics] = field(default_factory=list)
    # run-level figures that are not per-iteration (timings, EC fraction, ...)
    summary: dict = field(default_factory=dict)

    def append(self, step: StepMetrics) -> None:
        self.steps.append(step)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    @property
    def iterations(self) -> int:
        return len(self.steps)

    def total(self, name: str, mode: Mode | None = None) -> int:
        return sum(getattr(s, name) for s in self.steps if mode is None or s.mode == mode)

    @property
    def total_computations(self) -> int:
        return self.total("computations")

    @property
    def pull_computations(self) -> int:
        return self.total("computations", Mode.PULL)

    @property
    def total_skipped(self) -> int:
        return self.total("skipped_by_rr")

    @property
    def total_messages(self) -> int:
        return self.total("messages")

    def to_csv(self, dest=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for s in self.steps:
            w.writerow(s.row())
        text = buf.getvalue()
        if isinstance(dest, (str, os.PathLike)):
            with open(dest, "w", newline="") as fh:
                fh.write(text)
        elif dest is not None:
            dest.write(text)
        return text

    @classmethod
    def from_csv(cls, text: str) -> "MetricsLog":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or tuple(rows[0]) != CSV_HEADER:
            raise ValueError("not a metrics CSV")
        log = cls()
        for r in rows[1:]:
            log.append(StepMetrics(int(r[0]), Mode(r[1]), int(r[2]), int(r[3]), int(r[4]), int(r[5])))
        return log


class MessageCounter:
    """Counts writes and aggregations that cross logical-partition borders."""

    def __init__(self, g: Graph, plan: PartitionPlan | None):
        self.enabled = plan is not None and plan.num_partitions > 1
        if plan is not None and plan.num_vertices != g.num_vertices:
            raise ValueError("partition plan does not cover the graph")
        if not self.enabled:
            self.owner = None
            self.remote_in = None
            return
        self.owner = plan.owners()
        # distinct remote partitions among each vertex's in-neighbors
        dst = np.repeat(np.arange(g.num_vertices), g.in_degree)
        src_owner = self.owner[g.in_indices]
        remote = src_owner != self.owner[dst]
        pairs = np.unique(np.stack([dst[remote], src_owner[remote]]), axis=1)
        self.remote_in = np.bincount(pairs[0], minlength=g.num_vertices) if pairs.size else \
            np.zeros(g.num_vertices, dtype=np.int64)

    def pull(self, computed: np.ndarray) -> int:
        """One message per remote partition touched per computed destination."""
        if not self.enabled or len(computed) == 0:
            return 0
        return int(self.remote_in[computed].sum())

    def push(self, src: np.ndarray, dst: np.ndarray) -> int:
        """One message per property write whose endpoints have different owners."""
        if not self.enabled or len(src) == 0:
            return 0
        return int(np.count_nonzero(self.owner[src] != self.owner[dst]))


def message_accounting(log: MetricsLog) -> int:
    """Total cross-partition messages recorded over a run."""
    return log.total_messages
