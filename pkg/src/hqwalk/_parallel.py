"""Chunked, optionally threaded map over grid points.

Worker count comes from the ``HQWALK_WORKERS`` environment variable
(default 1). Results are always concatenated in chunk order, so reductions
over the output are deterministic regardless of the worker count.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

CHUNK = 1 << 16


def workers() -> int:
    try:
        return max(1, int(os.environ.get("HQWALK_WORKERS", "1")))
    except ValueError:
        return 1


def map_chunks(fn, size: int, chunk: int = CHUNK):
    """Call ``fn(slice)`` over consecutive chunks of ``range(size)``.

    ``fn`` returns an array or a tuple of arrays; pieces are concatenated
    along axis 0.
    """
    slices = [slice(a, min(a + chunk, size)) for a in range(0, size, chunk)] or [slice(0, 0)]
    nw = workers()
    if nw > 1 and len(slices) > 1:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            parts = list(pool.map(fn, slices))
    else:
        parts = [fn(s) for s in slices]
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate(p, axis=0) for p in zip(*parts))
    return np.concatenate(parts, axis=0)
