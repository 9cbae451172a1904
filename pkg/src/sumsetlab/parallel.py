"""Thread plumbing: fixed-size work chunks with order-independent reduction.

Chunk boundaries are a function of the workload only, never of the worker
count, so results are bit-identical no matter how many threads run them.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")

THREADS_ENV = "SUMSETLAB_THREADS"


def worker_count(requested: int | None = None) -> int:
    if requested is not None and requested >= 1:
        return requested
    env = os.environ.get(THREADS_ENV, "")
    if env.isdigit() and int(env) >= 1:
        return int(env)
    return os.cpu_count() or 1


def map_reduce(fn: Callable[[T], object], items: Iterable[T], reduce_fn, init, threads: int | None = None):
    """Apply ``fn`` to every item and fold results; deterministic fold order."""
    items = list(items)
    n = worker_count(threads)
    if n <= 1 or len(items) <= 1:
        results = [fn(it) for it in items]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(fn, items))
    acc = init
    for r in results:
        acc = reduce_fn(acc, r)
    return acc
