"""Index-chunked parallel map for realization sweeps.

Per-realization seeds are derived from the realization index, so results
are identical whatever the worker count or scheduling; chunks are
reassembled in index order.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np


def default_threads() -> int:
    return os.cpu_count() or 1


def map_index_chunks(fn, n_items: int, threads: int, chunk: int = 128):
    """Run ``fn(start, stop)`` over [0, n_items) and concatenate the results.

    ``fn`` returns one array or a tuple of arrays for its index range; the
    pieces are joined along axis 0 in index order.
    """
    if n_items <= 0:
        raise ValueError("nothing to map over")
    threads = max(1, int(threads))
    if threads == 1 or n_items <= chunk:
        return fn(0, n_items)
    ranges = [(s, min(s + chunk, n_items)) for s in range(0, n_items, chunk)]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        parts = list(ex.map(fn, *zip(*ranges)))
    first = parts[0]
    if isinstance(first, tuple):
        return tuple(np.concatenate([p[i] for p in parts]) for i in range(len(first)))
    return np.concatenate(parts)
