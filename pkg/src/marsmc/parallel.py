"""Worker-count resolution and deterministic chunked maps.

Results never depend on how work is split: every unit of work derives its
randomness from an explicit stream key, so running on 1 or 8 workers gives
bit-identical output. The MARSMC_THREADS environment variable caps the
worker count globally (0 or unset means no cap).
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np


def substream(seed: int, *path: int) -> np.random.Generator:
    """Counter-based generator for one unit of work, keyed by (seed, *path)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *path: int) -> int:
    """A 63-bit child seed, stable across platforms."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> 1)


def resolve_workers(requested: int = 0) -> int:
    """Effective worker count from a request and the MARSMC_THREADS cap."""
    auto = os.cpu_count() or 1
    count = auto if requested <= 0 else requested
    cap_raw = os.environ.get("MARSMC_THREADS", "0")
    try:
        cap = int(cap_raw)
    except ValueError:
        cap = 0
    if cap > 0:
        count = min(count, cap)
    return max(1, count)


def chunk_ranges(n_items: int, workers: int) -> list[tuple[int, int]]:
    """Split range(n_items) into at most ``workers`` contiguous chunks."""
    workers = max(1, min(workers, n_items))
    bounds = np.linspace(0, n_items, workers + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def run_chunked(fn, args_per_chunk: list, workers: int) -> list:
    """Apply ``fn`` to each argument tuple, possibly in a process pool.

    ``fn`` must be picklable (module-level). Results come back in submission
    order. With one worker (or one chunk) everything runs in-process.
    """
    if workers <= 1 or len(args_per_chunk) <= 1:
        return [fn(*args) for args in args_per_chunk]
    with ProcessPoolExecutor(max_workers=min(workers, len(args_per_chunk))) as pool:
        futures = [pool.submit(fn, *args) for args in args_per_chunk]
        return [f.result() for f in futures]
