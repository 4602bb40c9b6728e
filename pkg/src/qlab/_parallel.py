"""Thread-pool helpers for embarrassingly parallel sweeps."""

import os
from concurrent.futures import ThreadPoolExecutor

_ENV_VAR = "QLAB_THREADS"


def worker_count() -> int:
    """Worker cap from the QLAB_THREADS environment variable (default: cpu count)."""
    raw = os.environ.get(_ENV_VAR)
    if raw is None:
        return max(os.cpu_count() or 1, 1)
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{_ENV_VAR} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{_ENV_VAR} must be a positive integer, got {raw!r}")
    return n


def parallel_map(fn, items):
    """Map fn over items on a thread pool, preserving input order.

    Results are collected by index, so the output is deterministic whenever
    fn itself is. Falls back to a plain loop for a single worker.
    """
    items = list(items)
    n = min(worker_count(), max(len(items), 1))
    if n == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
