"""Optional thread parallelism, capped by FRACDIFF_NUM_THREADS.

Work items are independent and results are collected by index, so the
output is identical whatever the execution order or thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_cap() -> int:
    raw = os.environ.get("FRACDIFF_NUM_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def parallel_map(fn, items):
    """Map fn over items, threading if the environment allows it."""
    items = list(items)
    cap = min(thread_cap(), len(items)) if items else 1
    if cap <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=cap) as pool:
        return list(pool.map(fn, items))
