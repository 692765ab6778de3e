"""Brownian, drifted, sign-flipped and fractional Brownian paths on dyadic grids.

All paths live on ``[0, HORIZON]`` with grid step ``2**-level``, so a path at
level ``N`` carries ``2 * 2**N + 1`` values. The analysis window is ``[0, 1]``;
the second unit of time exists so that forward windows ``t + w`` starting in
``[0, 1]`` never leave the grid.
"""

from __future__ import annotations

import enum
import logging
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import linalg

from . import _rng
from .errors import ConfigurationError, DomainError, ResolutionError, UnsupportedKindError

__all__ = [
    "HORIZON",
    "MAX_LEVEL",
    "MAX_FBM_LEVEL",
    "PathKind",
    "SamplePath",
    "sample_bm",
    "refine_bridge",
    "sample_fbm",
    "fgn_autocovariance",
    "apply_drift",
    "flip_sign",
    "modulus_coefficient",
    "grid_times",
]

log = logging.getLogger(__name__)

HORIZON = 2
MAX_LEVEL = 24
MAX_FBM_LEVEL = 14


class PathKind(str, enum.Enum):
    BM = "BM"
    FBM = "FBM"
    DRIFTED = "DRIFTED"


@dataclass(frozen=True, eq=False)
class SamplePath:
    """A sampled path on the dyadic grid ``k * 2**-level``, ``0 <= k <= 2 * 2**level``.

    ``drift`` is set only for drifted paths and ``hurst`` only when the
    underlying process is fractional (a drifted fBm keeps its Hurst index so
    that detectors can pick the matching normalisation). ``bridge_seeds``
    records the seeds consumed by successive bridge refinements.
    """

    kind: PathKind
    level: int
    values: np.ndarray
    seed: int
    hurst: float | None = None
    drift: object | None = None
    bridge_seeds: tuple = ()
    horizon: int = field(default=HORIZON)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.horizon * 2**self.level + 1,):
            raise ResolutionError(
                f"expected {self.horizon * 2**self.level + 1} values at level {self.level}, "
                f"got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise DomainError("path values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def step(self) -> float:
        return 2.0**-self.level

    @property
    def drift_id(self) -> str | None:
        return None if self.drift is None else self.drift.descriptor

    @property
    def effective_hurst(self) -> float:
        """Self-similarity index used for fast-time normalisation (1/2 for BM)."""
        return 0.5 if self.hurst is None else self.hurst

    def times(self) -> np.ndarray:
        return grid_times(self.level, self.horizon)

    def metadata(self) -> dict:
        return {
            "kind": self.kind.value,
            "level": self.level,
            "horizon": self.horizon,
            "seed": self.seed,
            "hurst": self.hurst,
            "drift": self.drift_id,
            "bridge_seeds": list(self.bridge_seeds),
        }


def grid_times(level: int, horizon: int = HORIZON) -> np.ndarray:
    return np.arange(horizon * 2**level + 1, dtype=np.float64) * 2.0**-level


def _check_level(level, ceiling):
    if not isinstance(level, (int, np.integer)) or not 1 <= level <= ceiling:
        raise ConfigurationError(f"level must be an integer in [1, {ceiling}], got {level!r}")


def sample_bm(seed: int, level: int) -> SamplePath:
    """Standard Brownian motion on ``[0, 2]`` at grid step ``2**-level``.

    Increments are the counter-based normals of ``seed`` scaled by
    ``2**(-level/2)``; the path is their cumulative sum with ``B(0) = 0``.
    """
    _check_level(level, MAX_LEVEL)
    n = HORIZON * 2**level
    incr = _rng.normals(seed, n, stream=_rng.STREAM_BM) * 2.0 ** (-level / 2)
    values = np.empty(n + 1)
    values[0] = 0.0
    np.cumsum(incr, out=values[1:])
    return SamplePath(PathKind.BM, int(level), values, int(seed))


def refine_bridge(path: SamplePath, seed2: int) -> SamplePath:
    """Halve the grid step by Brownian-bridge midpoint sampling.

    Coarse values are copied bit-for-bit to the even indices; each midpoint is
    the neighbour average plus a centred normal of variance ``2**-(N+2)``.
    """
    if path.kind is not PathKind.BM:
        raise UnsupportedKindError(f"bridge refinement needs a BM path, got {path.kind.value}")
    if path.level + 1 > MAX_LEVEL:
        raise ConfigurationError(f"refined level would exceed {MAX_LEVEL}")
    v = path.values
    n_mid = v.size - 1
    z = _rng.normals(seed2, n_mid, stream=_rng.STREAM_BRIDGE)
    fine = np.empty(2 * n_mid + 1)
    fine[0::2] = v
    fine[1::2] = 0.5 * (v[:-1] + v[1:]) + z * 2.0 ** (-(path.level + 2) / 2)
    return replace(
        path,
        level=path.level + 1,
        values=fine,
        bridge_seeds=path.bridge_seeds + (int(seed2),),
    )


def fgn_autocovariance(hurst: float, lags) -> np.ndarray:
    """Unit-step fractional Gaussian noise covariance ``r(k)``."""
    k = np.abs(np.asarray(lags, dtype=np.float64))
    two_h = 2.0 * hurst
    return 0.5 * (np.abs(k + 1) ** two_h + np.abs(k - 1) ** two_h - 2.0 * k**two_h)


def _fgn_circulant(hurst, n, seed):
    r = fgn_autocovariance(hurst, np.arange(n + 1))
    row = np.concatenate([r, r[-2:0:-1]])
    m = row.size
    eig = np.fft.fft(row).real
    if eig.min() < -1e-10 * eig.max():
        return None
    eig = np.clip(eig, 0.0, None)
    z = _rng.normals(seed, 2 * m, stream=_rng.STREAM_FBM)
    w = (z[:m] + 1j * z[m:]) * np.sqrt(eig / m)
    return np.fft.fft(w).real[:n]


def _fgn_dense(hurst, n, seed):
    cov = linalg.toeplitz(fgn_autocovariance(hurst, np.arange(n)))
    chol = linalg.cholesky(cov, lower=True)
    z = _rng.normals(seed, n, stream=_rng.STREAM_FBM)
    return chol @ z


def sample_fbm(seed: int, hurst: float, level: int, method: str = "auto") -> SamplePath:
    """Fractional Brownian motion by exact circulant embedding.

    Parameters
    ----------
    seed : int
        Counter-RNG seed.
    hurst : float
        Hurst index in (0, 1).
    level : int
        Grid level, at most ``MAX_FBM_LEVEL``.
    method : {"auto", "circulant", "dense"}
        ``auto`` uses circulant embedding and falls back to a dense Cholesky
        factorisation (with a warning) if the embedding has a negative
        eigenvalue. ``dense`` forces the Cholesky route.
    """
    if not 0.0 < hurst < 1.0:
        raise ConfigurationError(f"hurst must lie in (0, 1), got {hurst!r}")
    _check_level(level, MAX_FBM_LEVEL)
    n = HORIZON * 2**level
    if method not in ("auto", "circulant", "dense"):
        raise ConfigurationError(f"unknown fBm method {method!r}")
    fgn = None
    if method != "dense":
        fgn = _fgn_circulant(hurst, n, seed)
        if fgn is None:
            if method == "circulant":
                raise ConfigurationError("circulant embedding is not nonnegative definite")
            warnings.warn(
                f"circulant embedding failed for H={hurst}, level={level}; using dense Cholesky",
                RuntimeWarning,
                stacklevel=2,
            )
    if fgn is None:
        fgn = _fgn_dense(hurst, n, seed)
    values = np.empty(n + 1)
    values[0] = 0.0
    np.cumsum(fgn * 2.0 ** (-level * hurst), out=values[1:])
    return SamplePath(PathKind.FBM, int(level), values, int(seed), hurst=float(hurst))


def apply_drift(path: SamplePath, f) -> SamplePath:
    """Return ``X = V - f`` evaluated on the path's grid."""
    if path.kind not in (PathKind.BM, PathKind.FBM):
        raise UnsupportedKindError(f"cannot add a drift to a {path.kind.value} path")
    return replace(
        path,
        kind=PathKind.DRIFTED,
        values=path.values - f(path.times()),
        drift=f,
    )


def flip_sign(path: SamplePath, coin: int) -> SamplePath:
    if path.kind is not PathKind.BM:
        raise UnsupportedKindError(f"sign flip is defined for BM paths, got {path.kind.value}")
    if coin not in (0, 1):
        raise ConfigurationError(f"coin must be 0 or 1, got {coin!r}")
    if coin == 0:
        return path
    return replace(path, values=-path.values)


def modulus_coefficient(path: SamplePath, h_min: float, h_max: float = 0.5) -> float:
    """Largest ``|V(s) - V(t)| / sqrt(|s-t| log(1/|s-t|))`` over grid pairs.

    Pairs range over the whole grid with ``h_min <= |s - t| <= h_max``. With
    the default ``h_max = 1/2`` the maximum usually sits at the longest lags,
    where the denominator is small, and lands near 3 rather than at the
    small-scale Lévy constant ``sqrt(2)``; pass a small ``h_max`` to probe
    the modulus itself.
    """
    step = path.step
    if h_min < step * (1 - 1e-12):
        raise ResolutionError(f"h_min={h_min} is below the grid step {step}")
    if not 0.0 < h_max <= 0.5:
        raise DomainError(f"h_max must lie in (0, 1/2], got {h_max}")
    d_min = int(np.ceil(h_min / step - 1e-9))
    d_max = int(np.floor(h_max / step + 1e-9))
    if d_min > d_max:
        raise DomainError("no grid pairs with h_min <= |s - t| <= h_max")
    v = path.values
    best = 0.0
    for d in range(d_min, d_max + 1):
        h = d * step
        inc = np.abs(v[d:] - v[:-d]).max()
        best = max(best, inc / np.sqrt(h * np.log(1.0 / h)))
    return float(best)
