"""Mini-chunk work stealing.

A vertex range is cut into mini-chunks of 256 vertices. Each thread owns a
contiguous run of chunks and claims them through its cursor; a thread whose
run is exhausted claims chunks from the cursor of whichever thread has the
most chunks left. Claims go through one lock, which plays the role of the
atomic fetch-and-add on a cursor.
"""

from __future__ import annotations

import heapq
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

MINI_CHUNK = 256


@dataclass(frozen=True)
class Claim:
    thread: int
    chunk: int
    lo: int
    hi: int
    stolen: bool
    owner: int
    start: float = 0.0
    end: float = 0.0


def mini_chunks(lo: int, hi: int, chunk_size: int = MINI_CHUNK) -> list[tuple[int, int]]:
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    return [(s, min(s + chunk_size, hi)) for s in range(lo, hi, chunk_size)]


class StealingScheduler:
    def __init__(self, lo: int, hi: int, num_threads: int, chunk_size: int = MINI_CHUNK):
        if num_threads < 1:
            raise ValueError("num_threads must be >= 1")
        self.chunks = mini_chunks(lo, hi, chunk_size)
        self.num_threads = num_threads
        n = len(self.chunks)
        share = [t * n // num_threads for t in range(num_threads + 1)]
        self._cursor = share[:-1]
        self._end = share[1:]
        self._lock = threading.Lock()

    def remaining(self, tid: int) -> int:
        return max(0, self._end[tid] - self._cursor[tid])

    def claim(self, tid: int) -> tuple[int, int] | None:
        """Next chunk for thread ``tid`` as ``(chunk_index, owner)``, or ``None`` when all are taken."""
        with self._lock:
            if self._cursor[tid] < self._end[tid]:
                c = self._cursor[tid]
                self._cursor[tid] += 1
                return c, tid
            victim = max(range(self.num_threads), key=lambda t: (self.remaining(t), -t))
            if self.remaining(victim) == 0:
                return None
            c = self._cursor[victim]
            self._cursor[victim] += 1
            return c, victim


def steal_schedule(
    lo: int,
    hi: int,
    num_threads: int,
    stall: dict[int, float] | None = None,
    cost: Callable[[int, int, int], float] | None = None,
    chunk_size: int = MINI_CHUNK,
) -> list[Claim]:
    """Deterministic discrete-event simulation of the stealing loop.

    ``stall[t]`` delays thread ``t``'s first claim (``math.inf`` never starts
    it). ``cost(thread, lo, hi)`` gives a chunk's processing time; the
    default is its vertex count. Ties between idle threads go to the lower id.
    """
    stall = stall or {}
    cost = cost or (lambda t, a, b: float(b - a))
    sched = StealingScheduler(lo, hi, num_threads, chunk_size)
    ready = [(float(stall.get(t, 0.0)), t) for t in range(num_threads)]
    heapq.heapify(ready)
    trace: list[Claim] = []
    while ready:
        clock, tid = heapq.heappop(ready)
        if math.isinf(clock):
            break
        got = sched.claim(tid)
        if got is None:
            continue
        c, owner = got
        a, b = sched.chunks[c]
        done = clock + cost(tid, a, b)
        trace.append(Claim(tid, c, a, b, owner != tid, owner, clock, done))
        heapq.heappush(ready, (done, tid))
    return trace


class ChunkRunner:
    """Runs a per-chunk kernel over a vertex range with work stealing.

    With one thread the kernel runs inline. ``stall`` maps a thread id to a
    sleep (seconds) before its first claim, for fault-injection tests.
    """

    def __init__(self, num_threads: int = 1, chunk_size: int = MINI_CHUNK,
                 stall: dict[int, float] | None = None, record: bool = False):
        if num_threads < 1:
            raise ValueError("num_threads must be >= 1")
        self.num_threads = num_threads
        self.chunk_size = chunk_size
        self.stall = dict(stall or {})
        self.record = record
        self.trace: list[list[Claim]] = []
        self._pool = ThreadPoolExecutor(num_threads) if num_threads > 1 else None

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def run(self, lo: int, hi: int, kernel: Callable[[int, int], None]) -> None:
        if hi <= lo:
            return
        if self._pool is None and not self.stall:
            claims = []
            for c, (a, b) in enumerate(mini_chunks(lo, hi, self.chunk_size)):
                kernel(a, b)
                if self.record:
                    claims.append(Claim(0, c, a, b, False, 0))
            if self.record:
                self.trace.append(claims)
            return

        sched = StealingScheduler(lo, hi, self.num_threads, self.chunk_size)
        claims: list[Claim] = []
        claims_lock = threading.Lock()

        def worker(tid: int) -> None:
            delay = self.stall.get(tid, 0.0)
            if delay:
                time.sleep(delay)
            while True:
                got = sched.claim(tid)
                if got is None:
                    return
                c, owner = got
                a, b = sched.chunks[c]
                kernel(a, b)
                if self.record:
                    with claims_lock:
                        claims.append(Claim(tid, c, a, b, owner != tid, owner))

        if self._pool is None:
            worker(0)
        else:
            futures = [self._pool.submit(worker, t) for t in range(self.num_threads)]
            for f in futures:
                f.result()
        if self.record:
            self.trace.append(sorted(claims, key=lambda cl: cl.chunk))
