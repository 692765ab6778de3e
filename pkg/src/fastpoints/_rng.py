"""Counter-based Gaussian streams.

Every normal variate is a pure function of ``(seed, stream, index)``: the
Philox-4x64 block cipher is keyed by ``(seed, stream)`` and run in counter
mode, and each 64-bit output is mapped to a Gaussian through the inverse
normal CDF. No rejection sampling is involved, so variate ``i`` never depends
on how many variates were drawn before it.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

_U64 = np.uint64
_MASK64 = (1 << 64) - 1

# stream identifiers; keep distinct per consumer
STREAM_BM = 0
STREAM_BRIDGE = 1
STREAM_FBM = 2


def _key(seed: int, stream: int) -> np.ndarray:
    return np.array([int(seed) & _MASK64, int(stream) & _MASK64], dtype=_U64)


def uniforms(seed: int, n: int, stream: int = 0, start: int = 0) -> np.ndarray:
    """Open-interval uniforms ``u[start], ..., u[start + n - 1]``."""
    if start % 4:
        # Philox emits blocks of four words; align and slice
        head = start % 4
        return uniforms(seed, n + head, stream, start - head)[head:]
    bg = np.random.Philox(key=_key(seed, stream))
    if start:
        bg.advance(start // 4)
    raw = bg.random_raw(n)
    return ((raw >> _U64(11)).astype(np.float64) + 0.5) * 2.0**-53


def normals(seed: int, n: int, stream: int = 0, start: int = 0) -> np.ndarray:
    """Standard normal variates at counter positions ``start .. start+n-1``."""
    return ndtri(uniforms(seed, n, stream, start))


def derive_seed(master_seed: int, index: int) -> int:
    """Per-path seed from a master seed and a path index."""
    ss = np.random.SeedSequence([int(master_seed) & _MASK64, int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
