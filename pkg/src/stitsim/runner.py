"""Seeded, order-stable replication runner.

Replication ``r`` of a run with master seed ``S`` always consumes the stream
``numpy.random.default_rng([S, r])``, so results do not depend on the number
of worker processes.  Workers are enabled through ``STITSIM_THREADS``.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

THREADS_ENV = "STITSIM_THREADS"


def thread_count(requested=None) -> int:
    if requested is not None:
        n = int(requested)
    else:
        raw = os.environ.get(THREADS_ENV, "1")
        try:
            n = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise ValueError("thread count must be at least 1")
    return n


def rep_rng(seed: int, rep: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(rep)])


def _call(payload):
    fn, seed, rep, args = payload
    return fn(rep_rng(seed, rep), *args)


def run_replications(fn, reps: int, seed: int, args: tuple = (), threads=None, start: int = 0):
    """``[fn(rng_r, *args) for r in range(start, start + reps)]`` in replication order.

    ``fn`` must be picklable (a module-level function) when more than one
    worker is used.
    """
    n = thread_count(threads)
    payloads = [(fn, seed, r, args) for r in range(start, start + reps)]
    if n == 1 or reps <= 1:
        return [_call(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(_call, payloads, chunksize=max(1, reps // (4 * n))))
