"""Chunked process-pool map that avoids pickling the inputs where ``fork`` is available."""
from __future__ import annotations

import multiprocessing as mp
import os
from concurrent.futures import ProcessPoolExecutor

_SHARED = None


def default_workers() -> int:
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:  # not on Linux
        return os.cpu_count() or 1


def _run_shared(fn, start, stop):
    return [fn(item) for item in _SHARED[start:stop]]


def _run_items(fn, items):
    return [fn(item) for item in items]


def parallel_map(fn, items: list, workers: int, chunk: int | None = None) -> list:
    """``[fn(x) for x in items]`` across ``workers`` processes, results in input order."""
    global _SHARED
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    chunk = chunk or max(1, -(-len(items) // (workers * 4)))
    bounds = [(i, min(i + chunk, len(items))) for i in range(0, len(items), chunk)]
    out = []
    if "fork" in mp.get_all_start_methods():
        # children inherit the list copy-on-write; only index ranges cross the pipe
        _SHARED = items
        try:
            with ProcessPoolExecutor(workers, mp_context=mp.get_context("fork")) as ex:
                for part in ex.map(_run_shared, [fn] * len(bounds), *zip(*bounds)):
                    out.extend(part)
        finally:
            _SHARED = None
    else:
        with ProcessPoolExecutor(workers) as ex:
            parts = ex.map(_run_items, [fn] * len(bounds), [items[a:b] for a, b in bounds])
            for part in parts:
                out.extend(part)
    return out
