"""Per-level interval flags: fast increments, fast oscillation, nearness to zero.

A level-``m`` flag array has one entry per dyadic interval
``[k 2**-m, (k+1) 2**-m]`` of ``[0, 1]``. Fast detectors use strict ``>``
against their threshold; the boundary event has probability zero for
Gaussian paths. The near-zero detector uses ``<=``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np
from scipy.special import log_ndtr, ndtr

from .drift import DriftSpec, Zero, holder_coefficient
from .errors import ConfigurationError, DomainError, ResolutionError, UsageError
from .paths import PathKind, SamplePath

__all__ = [
    "FlagKind",
    "IntervalFlags",
    "fast_threshold",
    "l_window",
    "l_threshold",
    "l_flags",
    "sup_threshold",
    "sup_flags",
    "zero_threshold",
    "default_zero_c",
    "zero_near_flags",
    "intersect_flags",
    "count",
    "l_probability",
    "expected_l_count",
    "log2_expected_l_count",
    "zero_probabilities",
    "expected_zero_count",
    "holder_sandwich",
    "SandwichResult",
]

LN2 = math.log(2.0)


class FlagKind(str, enum.Enum):
    FAST_L = "FAST_L"
    FAST_SUP = "FAST_SUP"
    ZERO_NEAR = "ZERO_NEAR"
    INTERSECT = "INTERSECT"


@dataclass(frozen=True, eq=False)
class IntervalFlags:
    level: int
    kind: FlagKind
    flags: np.ndarray
    params: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))

    def __post_init__(self):
        flags = np.asarray(self.flags, dtype=bool)
        if flags.shape != (2**self.level,):
            raise UsageError(f"level {self.level} needs {2**self.level} flags, got {flags.shape}")
        flags.setflags(write=False)
        object.__setattr__(self, "flags", flags)
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))

    def __eq__(self, other):
        if not isinstance(other, IntervalFlags):
            return NotImplemented
        return self.level == other.level and np.array_equal(self.flags, other.flags)

    def __le__(self, other):
        """Subset relation on the flagged interval sets."""
        if self.level != other.level:
            raise UsageError("flag sets on different levels are not comparable")
        return not np.any(self.flags & ~other.flags)

    def count(self) -> int:
        return int(np.count_nonzero(self.flags))

    def to_rle(self) -> str:
        """Run-length text: ``level:first_bit:run,run,...``."""
        f = self.flags.astype(np.int8)
        edges = np.flatnonzero(np.diff(f)) + 1
        runs = np.diff(np.concatenate([[0], edges, [f.size]]))
        return f"{self.level}:{int(f[0])}:" + ",".join(map(str, runs.tolist()))

    @classmethod
    def from_rle(cls, text: str, kind: FlagKind = FlagKind.INTERSECT) -> "IntervalFlags":
        level, first, runs = text.strip().split(":")
        bits, bit = [], int(first)
        for r in runs.split(","):
            bits.append(np.full(int(r), bit, dtype=bool))
            bit ^= 1
        return cls(int(level), kind, np.concatenate(bits))


def _starts(path: SamplePath, m: int) -> np.ndarray:
    if path.level < m:
        raise ResolutionError(f"path level {path.level} is coarser than flag level {m}")
    return np.arange(2**m) << (path.level - m)


def fast_threshold(a: float, h: float) -> float:
    """``a * sqrt(2 h log(1/h))``."""
    if a < 0:
        raise DomainError(f"a must be >= 0, got {a}")
    if not 0.0 < h < 1.0:
        raise DomainError(f"h must lie in (0, 1), got {h}")
    return a * math.sqrt(2.0 * h * math.log(1.0 / h))


# ------------------------------------------------------ endpoint windows ---


def l_window(m: int) -> float:
    """Window length ``m 2**-m`` of the level-``m`` increment test."""
    return m * 2.0**-m


def _log_ratio(m):
    # log(2**m / m) without forming 2**m
    return m * LN2 - math.log(m)


def l_threshold(m: int, a: float, epsilon: float = 0.0, hurst: float = 0.5, theta: float = 1.0) -> float:
    """Increment threshold ``a (1+eps) sqrt(2) w**H sqrt(log(2**m / m))``, ``w = m 2**-m``.

    At ``H = 1/2`` this is ``a (1+eps) sqrt(m 2**(1-m) log(2**m/m))``.
    """
    if m < 2:
        raise DomainError(f"level m must be >= 2, got {m}")
    return theta * a * (1.0 + epsilon) * math.sqrt(2.0 * _log_ratio(m)) * l_window(m) ** hurst


def l_flags(
    path: SamplePath,
    m: int,
    a: float,
    epsilon: float = 0.0,
    theta: float = 1.0,
) -> IntervalFlags:
    """Flag level-``m`` intervals whose forward increment over ``m 2**-m`` is large."""
    if m < 2:
        raise ResolutionError(f"level m must be >= 2, got {m}")
    idx = _starts(path, m)
    off = m << (path.level - m)
    v = path.values
    thr = l_threshold(m, a, epsilon, path.effective_hurst, theta)
    flags = np.abs(v[idx + off] - v[idx]) > thr
    return IntervalFlags(
        m, FlagKind.FAST_L, flags, {"a": a, "epsilon": epsilon, "theta": theta, "threshold": thr, "window": l_window(m)}
    )


def l_probability(m: int, a: float, epsilon: float = 0.0) -> float:
    """Exact ``P(L(I) = 1)`` for Brownian motion: a two-sided Gaussian tail."""
    x = a * (1.0 + epsilon) * math.sqrt(2.0 * _log_ratio(m))
    return float(2.0 * ndtr(-x))


def expected_l_count(m: int, a: float, epsilon: float = 0.0) -> float:
    """Exact mean of ``count(l_flags(...))`` for pure Brownian motion."""
    if m < 2:
        raise DomainError(f"level m must be >= 2, got {m}")
    return 2.0**m * l_probability(m, a, epsilon)


def log2_expected_l_count(m: int, a: float, epsilon: float = 0.0) -> float:
    x = a * (1.0 + epsilon) * math.sqrt(2.0 * _log_ratio(m))
    return m + 1.0 + float(log_ndtr(-x)) / LN2


# -------------------------------------------------------- sup over window ---


def sup_threshold(j: int, b: float, theta: float = 1.0) -> float:
    """``b sqrt(2 h log(1/h))`` at ``h = 2**-j``."""
    return theta * b * math.sqrt(2.0 * 2.0**-j * j * LN2)


def sup_flags(path: SamplePath, j: int, b: float, theta: float = 1.0) -> IntervalFlags:
    """Flag level-``j`` intervals where the path leaves its start value by more
    than the threshold somewhere inside the interval (grid maximum)."""
    if path.level < j + 3:
        raise ResolutionError(f"sup_flags at level {j} needs path level >= {j + 3}, got {path.level}")
    r = 2 ** (path.level - j)
    n = 2**path.level
    v = path.values
    block = v[:n].reshape(2**j, r)
    ends = v[r : n + 1 : r]
    start = block[:, 0]
    hi = np.maximum(block.max(axis=1), ends)
    lo = np.minimum(block.min(axis=1), ends)
    osc = np.maximum(hi - start, start - lo)
    thr = sup_threshold(j, b, theta)
    return IntervalFlags(j, FlagKind.FAST_SUP, osc > thr, {"b": b, "theta": theta, "threshold": thr})


# ------------------------------------------------------------- near zero ---


def zero_threshold(m: int, c: float) -> float:
    """``c sqrt(m 2**-m log 2)``."""
    return c * math.sqrt(m * 2.0**-m * LN2)


def default_zero_c(drift: DriftSpec | None, grid_level: int = 10) -> float:
    """``max(2 c0, 2 sqrt(2))`` with ``c0`` the drift's grid 1/2-Hölder coefficient."""
    c0 = 0.0 if drift is None or isinstance(drift, Zero) else holder_coefficient(drift, 0.5, grid_level)
    return max(2.0 * c0, 2.0 * math.sqrt(2.0))


def zero_near_flags(
    path: SamplePath,
    m: int,
    c: float | None = None,
    mode: str = "left",
) -> IntervalFlags:
    """Flag level-``m`` intervals where the path is within ``c sqrt(m 2**-m log 2)`` of zero.

    ``mode="left"`` tests the left endpoint only; ``mode="min"`` tests the
    smallest ``|V|`` on the interval's grid points.
    """
    if path.kind is PathKind.FBM:
        raise ConfigurationError("near-zero flags are calibrated for Brownian paths")
    if c is None:
        c = default_zero_c(path.drift)
    idx = _starts(path, m)
    thr = zero_threshold(m, c)
    v = path.values
    if mode == "left":
        near = np.abs(v[idx])
    elif mode == "min":
        r = 2 ** (path.level - m)
        n = 2**path.level
        near = np.minimum(np.abs(v[:n]).reshape(2**m, r).min(axis=1), np.abs(v[r : n + 1 : r]))
    else:
        raise ConfigurationError(f"unknown mode {mode!r}")
    return IntervalFlags(m, FlagKind.ZERO_NEAR, near <= thr, {"c": c, "threshold": thr, "mode": mode})


def zero_probabilities(m: int, c: float, drift: DriftSpec | None = None) -> np.ndarray:
    """Exact ``P(|B(k 2**-m) - f(k 2**-m)| <= threshold)`` for ``k = 0 .. 2**m - 1``."""
    thr = zero_threshold(m, c)
    t = np.arange(2**m) * 2.0**-m
    f = np.zeros_like(t) if drift is None else drift(t)
    out = np.empty_like(t)
    out[0] = float(abs(f[0]) <= thr)
    sd = np.sqrt(t[1:])
    out[1:] = ndtr((f[1:] + thr) / sd) - ndtr((f[1:] - thr) / sd)
    return out


def expected_zero_count(m: int, c: float, drift: DriftSpec | None = None) -> float:
    return float(zero_probabilities(m, c, drift).sum())


# --------------------------------------------------------------- algebra ---


def intersect_flags(x: IntervalFlags, y: IntervalFlags) -> IntervalFlags:
    if x.level != y.level:
        raise UsageError(f"cannot intersect flags on levels {x.level} and {y.level}")
    return IntervalFlags(
        x.level,
        FlagKind.INTERSECT,
        x.flags & y.flags,
        {"left": x.kind.value, "right": y.kind.value},
    )


def count(flags: IntervalFlags) -> int:
    return flags.count()


# ---------------------------------------------------------- Hölder sandwich ---


@dataclass(frozen=True)
class SandwichResult:
    inner: IntervalFlags  # B at a + delta
    middle: IntervalFlags  # X at a
    outer: IntervalFlags  # B at a - delta
    delta: float

    @property
    def violations(self) -> int:
        lo = np.count_nonzero(self.inner.flags & ~self.middle.flags)
        hi = np.count_nonzero(self.middle.flags & ~self.outer.flags)
        return int(lo + hi)


def holder_sandwich(
    path: SamplePath,
    drift: DriftSpec,
    m: int,
    a: float,
    c0: float,
    epsilon: float = 0.0,
    drifted: SamplePath | None = None,
) -> SandwichResult:
    """Compare level-``m`` increment flags of ``B`` and ``X = B - f``.

    With ``c0`` a 1/2-Hölder coefficient of ``f`` and window ``h = m 2**-m``,
    the triangle inequality gives ``flags_B(a + d) <= flags_X(a) <= flags_B(a - d)``
    for ``d = c0 / sqrt(2 log(1/h))``. ``a - d`` is clamped at 0.
    """
    from .paths import apply_drift

    if path.kind is not PathKind.BM:
        raise ConfigurationError("the sandwich compares a BM path with its drifted version")
    x = drifted if drifted is not None else apply_drift(path, drift)
    delta = c0 / math.sqrt(2.0 * math.log(1.0 / l_window(m)))
    return SandwichResult(
        inner=l_flags(path, m, a + delta, epsilon),
        middle=l_flags(x, m, a, epsilon),
        outer=l_flags(path, m, max(a - delta, 0.0), epsilon),
        delta=delta,
    )
