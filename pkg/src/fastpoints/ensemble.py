"""Seed-indexed ensembles whose results do not depend on worker count.

Path ``i`` of an ensemble always gets ``derive_seed(master_seed, i)``; results
come back in index order and are reduced sequentially, so the floating-point
summation order is fixed.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

import numpy as np

from ._rng import derive_seed

__all__ = ["path_seeds", "map_seeds", "stack"]


def path_seeds(master_seed: int, n_paths: int, offset: int = 0) -> list[int]:
    return [derive_seed(master_seed, offset + i) for i in range(n_paths)]


def map_seeds(fn: Callable, seeds: Sequence[int], workers: int = 1) -> list:
    """Apply ``fn`` to each seed; ``fn`` must be picklable when ``workers > 1``."""
    if workers <= 1 or len(seeds) < 2:
        return [fn(s) for s in seeds]
    chunk = max(1, len(seeds) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, seeds, chunksize=chunk))


def stack(results: list) -> np.ndarray:
    return np.stack([np.asarray(r, dtype=np.float64) for r in results])
