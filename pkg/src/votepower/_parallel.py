"""Optional process-level fan-out of independent per-prime computations.

Residue pipelines for different primes share nothing, so they can run in a
small process pool.  Fork start is required (cheap, inherits warm caches);
anything else falls back to serial.  Results are ordered by prime, so the
output is identical either way.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def _has_fork() -> bool:
    return hasattr(os, "fork")


def map_over_primes(worker, primes, want_parallel: bool, max_workers: int = 2):
    """worker(p, ...) per prime, optionally across processes, order preserved."""
    cpus = os.cpu_count() or 1
    if not want_parallel or len(primes) < 2 or cpus < 2 or not _has_fork():
        return [worker(p) for p in primes]
    import multiprocessing
    ctx = multiprocessing.get_context("fork")
    workers = min(max_workers, cpus, len(primes))
    with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
        return list(pool.map(worker, primes, chunksize=max(1, len(primes) // workers)))


def auto_parallel(work_estimate: int, threshold: int = 4_000_000) -> bool:
    """Heuristic: fan out only when the per-run work dwarfs pool startup."""
    return work_estimate >= threshold
