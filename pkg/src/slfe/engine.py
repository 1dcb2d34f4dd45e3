"""RR-aware pull/push execution runtime.

Both modes are synchronous: every iteration reads the property snapshot
left by the previous one and writes a fresh buffer. Pull writes are
partitioned by destination chunk, so they never collide; push combines
candidate values into the shared buffer under a lock (the stand-in for an
atomic compare-and-swap loop). Because min/max are commutative and
idempotent, and sums run sequentially over sorted in-neighbor lists, the
results do not depend on the thread count.

Start late (min/max apps)
    A destination that has an active in-neighbor is *considered* for a
    pull. If the ruler (the 1-based iteration number) is still below its
    ``last_iter`` the pull is skipped and the vertex is marked pending; a
    pending vertex is pulled as soon as the ruler reaches its ``last_iter``,
    whether or not any in-neighbor is active at that point. Pulls always
    read all in-neighbors. A pull->push transition reactivates every vertex,
    which delivers every edge and so settles all pending vertices.

Finish early (arithmetic apps)
    Each vertex keeps a stability counter; once it reaches the vertex's
    horizon the vertex is frozen at its cached value.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp

from slfe.errors import DivergenceError, UsageError
from slfe.graph import Graph, PartitionPlan
from slfe.metrics import MessageCounter, MetricsLog, Mode, StepMetrics
from slfe.rrg import RRGuidance
from slfe.scheduler import MINI_CHUNK, ChunkRunner

DEFAULT_DENSE_DIVISOR = 20.0


@dataclass
class EngineConfig:
    threads: int = 1
    rr: bool = True
    dense_divisor: float = DEFAULT_DENSE_DIVISOR
    # arithmetic apps: maxIterations / global L1 stopping rule and stability test
    max_iters: int = 100
    epsilon: float = 0.0
    stability_epsilon: float = 0.0
    # min/max apps: safety valve, defaults to 10 * numVertices
    max_rounds: int | None = None
    chunk_size: int = MINI_CHUNK
    plan: PartitionPlan | None = None
    # test hooks
    schedule: Callable[[int], Mode | None] | None = None
    stall: dict[int, float] | None = None
    record_schedule: bool = False
    record_values: bool = False

    def __post_init__(self):
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.dense_divisor <= 0:
            raise ValueError("dense_divisor must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.stability_epsilon < 0 or self.epsilon < 0:
            raise ValueError("epsilons must be non-negative")


@dataclass
class EngineState:
    values: np.ndarray
    active: np.ndarray
    mode: Mode = Mode.PUSH
    pull_was_last: bool = False
    iteration: int = 0
    last_ruler: int | None = None
    pending: np.ndarray | None = None
    rulers: np.ndarray | None = None
    stable: np.ndarray | None = None
    pull_counts: np.ndarray | None = None

    def __post_init__(self):
        n = len(self.values)
        if self.pending is None:
            self.pending = np.zeros(n, dtype=bool)
        if self.pull_counts is None:
            self.pull_counts = np.zeros(n, dtype=np.int64)

    @property
    def active_verts(self) -> int:
        return int(np.count_nonzero(self.active))

    def copy(self) -> "EngineState":
        def c(a):
            return None if a is None else a.copy()

        return EngineState(
            self.values.copy(), self.active.copy(), self.mode, self.pull_was_last,
            self.iteration, self.last_ruler, c(self.pending), c(self.rulers),
            c(self.stable), c(self.pull_counts),
        )

    def allocate_rulers(self) -> None:
        n = len(self.values)
        self.rulers = np.zeros(n, dtype=np.int64)
        self.stable = np.full(n, np.nan)


@dataclass
class RunResult:
    values: np.ndarray
    metrics: MetricsLog
    state: EngineState
    raw: np.ndarray
    history: list[np.ndarray] = field(default_factory=list)
    schedule_trace: list = field(default_factory=list)


def gather_rows(indptr: np.ndarray, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Edge positions of ``rows`` in a CSR, plus each row's offset into them."""
    starts = indptr[rows]
    lens = indptr[rows + 1] - starts
    offsets = np.cumsum(lens) - lens
    total = int(lens.sum()) if len(lens) else 0
    return np.repeat(starts - offsets, lens) + np.arange(total), offsets


def active_out_edges(active: np.ndarray, g: Graph) -> int:
    return int(g.out_degree[active].sum())


def mode_select(active: np.ndarray, g: Graph, dense_divisor: float = DEFAULT_DENSE_DIVISOR) -> Mode:
    """Pull when active out-edges exceed ``numEdges / dense_divisor``, push otherwise (ties push)."""
    if active_out_edges(active, g) > g.num_edges / dense_divisor:
        return Mode.PULL
    return Mode.PUSH


class Engine:
    """Binds one application, graph and guidance to a runtime configuration."""

    def __init__(self, app, g: Graph, rrg: RRGuidance | None, config: EngineConfig | None = None):
        self.app = app
        self.g = g
        self.config = config or EngineConfig()
        if rrg is not None and rrg.num_vertices != g.num_vertices:
            raise UsageError(
                f"guidance covers {rrg.num_vertices} vertices, graph has {g.num_vertices}"
            )
        self.guidance = rrg
        # guidance used for skipping; RR-off keeps it only for the EC metric
        self.rrg = rrg if self.config.rr else None
        n = g.num_vertices
        if self.rrg is not None:
            self.last_iter = self.rrg.last_iter.astype(np.int64)
        else:
            self.last_iter = np.zeros(n, dtype=np.int64)
        if rrg is not None:
            # finish-early horizon: at least one computation for every visited
            # vertex; vertices the propagation never reached are never frozen
            self.horizon = np.where(
                rrg.visited, np.maximum(rrg.last_iter.astype(np.int64), 1), np.iinfo(np.int64).max
            )
        else:
            self.horizon = np.ones(n, dtype=np.int64)
        self.messages = MessageCounter(g, self.config.plan)
        self.runner = ChunkRunner(
            self.config.threads, self.config.chunk_size, self.config.stall,
            record=self.config.record_schedule,
        )
        self._push_lock = threading.Lock()
        self._in_matrix = None

    # ----------------------------------------------------------------- min/max

    def init_state(self, **kwargs) -> EngineState:
        values, active = self.app.init(self.g, **kwargs)
        state = EngineState(values, active)
        if self.app.family == "arith":
            state.allocate_rulers()
        return state

    def select_mode(self, state: EngineState, iteration: int) -> Mode:
        if self.app.family == "arith":
            return Mode.PULL
        if self.config.schedule is not None:
            forced = self.config.schedule(iteration)
            if forced is not None:
                return Mode(forced)
        return mode_select(state.active, self.g, self.config.dense_divisor)

    def edge_proc_minmax(self, state: EngineState, ruler: int, mode: Mode | None = None) -> StepMetrics:
        """One min/max iteration; ``ruler`` is compared with each ``last_iter``."""
        if state.last_ruler is not None and ruler < state.last_ruler:
            raise UsageError(f"ruler went backwards: {ruler} after {state.last_ruler}")
        state.last_ruler = ruler
        state.iteration += 1
        mode = mode or self.select_mode(state, state.iteration)
        if mode == Mode.PUSH:
            return self.push_step(state)
        return self.pull_step(state, ruler)

    def pull_step(self, state: EngineState, ruler: int) -> StepMetrics:
        g, app = self.g, self.app
        state.mode = Mode.PULL
        state.pull_was_last = True
        step = StepMetrics(state.iteration, Mode.PULL, active_vertices=state.active_verts)

        src_ids = np.flatnonzero(state.active)
        eidx, _ = gather_rows(g.out_indptr, src_ids)
        considered = np.zeros(g.num_vertices, dtype=bool)
        considered[g.out_indices[eidx]] = True
        considered |= state.pending
        cand_ids = np.flatnonzero(considered)
        if self.rrg is not None:
            due = self.last_iter[cand_ids] <= ruler
            compute_ids = cand_ids[due]
            skipped = cand_ids[~due]
        else:
            compute_ids = cand_ids
            skipped = cand_ids[:0]
        state.pending[:] = False
        state.pending[skipped] = True

        cur = state.values
        nxt = cur.copy()
        nxt_active = np.zeros(g.num_vertices, dtype=bool)

        def kernel(lo: int, hi: int) -> None:
            i0, i1 = np.searchsorted(compute_ids, [lo, hi])
            if i0 == i1:
                return
            ids = compute_ids[i0:i1]
            agg = app.pull_func(cur, g, ids)
            better = app.improves(agg, cur[ids])
            nxt[ids[better]] = agg[better]
            nxt_active[ids[better]] = True

        self.runner.run(0, g.num_vertices, kernel)

        state.pull_counts[compute_ids] += 1
        state.values = nxt
        state.active = nxt_active
        step.computations = len(compute_ids)
        step.skipped_by_rr = len(skipped)
        step.relaxations = int(g.in_degree[compute_ids].sum())
        step.messages = self.messages.pull(compute_ids)
        return step

    def push_step(self, state: EngineState) -> StepMetrics:
        """Push from active sources; a pull->push transition first reactivates everything."""
        g, app = self.g, self.app
        transition = state.pull_was_last
        if transition:
            state.active[:] = True
            state.pull_was_last = False
            state.pending[:] = False
        state.mode = Mode.PUSH
        step = StepMetrics(state.iteration, Mode.PUSH, active_vertices=state.active_verts,
                           transition=transition)

        src_ids = np.flatnonzero(state.active & (g.out_degree > 0))
        cur = state.values
        nxt = cur.copy()
        counted = [0]

        def kernel(lo: int, hi: int) -> None:
            i0, i1 = np.searchsorted(src_ids, [lo, hi])
            if i0 == i1:
                return
            srcs, dsts, cand = app.push_func(cur, g, src_ids[i0:i1])
            # a write happens only where the candidate beats the snapshot
            hit = app.improves(cand, cur[dsts])
            msgs = self.messages.push(srcs[hit], dsts[hit])
            with self._push_lock:
                app.combine.at(nxt, dsts[hit], cand[hit])
                counted[0] += msgs

        self.runner.run(0, g.num_vertices, kernel)

        state.values = nxt
        state.active = app.improves(nxt, cur)
        step.computations = len(src_ids)
        step.relaxations = int(g.out_degree[src_ids].sum())
        step.messages = counted[0]
        return step

    def _run_minmax(self, state: EngineState, result: RunResult) -> None:
        n = self.g.num_vertices
        cap = self.config.max_rounds
        if cap is None:
            cap = 10 * max(n, 1)
        ruler = 0
        while state.active.any() or state.pending.any():
            ruler += 1
            if ruler > cap:
                raise DivergenceError(f"{self.app.name} did not converge within {cap} rounds")
            result.metrics.append(self.edge_proc_minmax(state, ruler))
            if self.config.record_values:
                result.history.append(state.values.copy())

    # -------------------------------------------------------------- arithmetic

    @property
    def in_matrix(self) -> sp.csr_matrix:
        if self._in_matrix is None:
            g = self.g
            self._in_matrix = sp.csr_matrix(
                (np.ones(g.num_edges), g.in_indices, g.in_indptr),
                shape=(g.num_vertices, g.num_vertices),
            )
        return self._in_matrix

    def compute_mask(self, state: EngineState) -> np.ndarray:
        if self.rrg is None:
            return np.ones(self.g.num_vertices, dtype=bool)
        return state.rulers < self.horizon

    def edge_proc_arith(self, state: EngineState) -> tuple[StepMetrics, np.ndarray, np.ndarray]:
        """Pull sums for every vertex that has not finished early.

        Returns the step metrics, the aggregate buffer and the ids computed.
        Destinations without in-edges keep their current value as aggregate.
        """
        if state.rulers is None or state.stable is None:
            raise UsageError("arithmetic edgeProc needs per-vertex rulers; call allocate_rulers()")
        g, app = self.g, self.app
        state.iteration += 1
        state.mode = Mode.PULL
        state.pull_was_last = True
        compute_ids = np.flatnonzero(self.compute_mask(state))
        pull_ids = compute_ids[g.in_degree[compute_ids] > 0]
        msg = app.message(state.values, g)
        agg = state.values.copy()
        A = self.in_matrix

        def kernel(lo: int, hi: int) -> None:
            i0, i1 = np.searchsorted(pull_ids, [lo, hi])
            if i0 == i1:
                return
            ids = pull_ids[i0:i1]
            agg[ids] = A[ids] @ msg

        self.runner.run(0, g.num_vertices, kernel)
        state.pull_counts[compute_ids] += 1
        step = StepMetrics(
            state.iteration, Mode.PULL,
            computations=len(compute_ids),
            active_vertices=len(compute_ids),
            messages=self.messages.pull(pull_ids),
            skipped_by_rr=g.num_vertices - len(compute_ids),
        )
        return step, agg, compute_ids

    def vertex_update(self, state: EngineState, agg: np.ndarray, compute_ids: np.ndarray | None = None) -> int:
        """Apply the vertex function to unfrozen vertices and update stability counters.

        Returns the number of computed vertices whose value changed.
        """
        if state.rulers is None or state.stable is None:
            raise UsageError("vertex_update needs per-vertex rulers")
        if compute_ids is None:
            compute_ids = np.flatnonzero(self.compute_mask(state))
        new = self.app.vertex_func(agg[compute_ids], self.g, compute_ids)
        old = state.stable[compute_ids]
        eps = self.config.stability_epsilon
        same = (new == old) if eps == 0 else (np.abs(new - old) <= eps)
        ids_same, ids_changed = compute_ids[same], compute_ids[~same]
        state.rulers[ids_same] += 1
        state.rulers[ids_changed] = 0
        state.stable[ids_changed] = new[~same]
        values = state.values.copy()
        values[compute_ids] = new
        if self.rrg is not None:
            # frozen vertices serve the cached stable value
            frozen = ~self.compute_mask(state)
            values[frozen] = state.stable[frozen]
        state.values = values
        return len(ids_changed)

    def _run_arith(self, state: EngineState, result: RunResult) -> None:
        cfg = self.config
        for _ in range(cfg.max_iters):
            before = state.values
            step, agg, ids = self.edge_proc_arith(state)
            self.vertex_update(state, agg, ids)
            result.metrics.append(step)
            if cfg.record_values:
                result.history.append(state.values.copy())
            delta = float(np.abs(state.values - before).sum())
            if delta < cfg.epsilon:
                break
        result.metrics.summary["ec_fraction"] = self.ec_fraction(state)

    def ec_fraction(self, state: EngineState) -> float:
        """Share of vertices whose stability counter reached their horizon."""
        n = self.g.num_vertices
        if n == 0 or state.rulers is None:
            return 0.0
        return float(np.count_nonzero(state.rulers >= self.horizon) / n)

    # ----------------------------------------------------------------- driver

    def run(self, **init_kwargs) -> RunResult:
        state = self.init_state(**init_kwargs)
        result = RunResult(state.values, MetricsLog(), state, state.values)
        t0 = time.perf_counter()
        try:
            if self.app.family == "arith":
                self._run_arith(state, result)
            else:
                self._run_minmax(state, result)
        finally:
            self.runner.close()
        result.metrics.summary["execution_seconds"] = time.perf_counter() - t0
        result.state = state
        result.raw = state.values
        result.values = self.app.report(state.values, self.g)
        result.schedule_trace = self.runner.trace
        return result


def run_until_convergence(app, g: Graph, rrg: RRGuidance | None,
                          config: EngineConfig | None = None, **init_kwargs) -> tuple[np.ndarray, MetricsLog]:
    """Run ``app`` to termination and return ``(values, metrics)``."""
    res = Engine(app, g, rrg, config).run(**init_kwargs)
    return res.values, res.metrics
