"""Deterministic drift functions and empirical Hölder probes.

Drifts are small frozen dataclasses; calling one on an array of times returns
the drift values. ``descriptor`` gives a compact text form that
:func:`parse_drift` reads back, e.g. ``cantor:gamma=1/9,depth=20``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, DomainError, UsageError

__all__ = [
    "DriftSpec",
    "Zero",
    "Linear",
    "Cantor",
    "Loud",
    "Tabulated",
    "Sign",
    "IntervalList",
    "parse_drift",
    "cantor_value",
    "cantor_components",
    "loud_value",
    "triangle_wave",
    "holder_coefficient",
    "reverse_holder_witness",
    "sign_set_indicator",
    "default_gamma1",
]


class DriftSpec:
    """Base class: a deterministic function of time on ``[0, 2]``."""

    descriptor: str

    def __call__(self, t):
        raise NotImplementedError

    def scalar(self, t: float) -> float:
        return float(self(np.asarray([t], dtype=np.float64))[0])


@dataclass(frozen=True)
class Zero(DriftSpec):
    def __call__(self, t):
        return np.zeros_like(np.asarray(t, dtype=np.float64))

    @property
    def descriptor(self):
        return "zero"


@dataclass(frozen=True)
class Linear(DriftSpec):
    c: float

    def __call__(self, t):
        return self.c * np.asarray(t, dtype=np.float64)

    @property
    def descriptor(self):
        return f"linear:c={self.c!r}"


@dataclass(frozen=True)
class Cantor(DriftSpec):
    """Middle ``(1 - 2 gamma)`` Cantor function, constant 1 beyond ``t = 1``."""

    gamma: float
    depth: int = 30

    def __post_init__(self):
        _check_gamma(self.gamma)
        if self.depth < 0:
            raise ConfigurationError(f"depth must be >= 0, got {self.depth}")

    @property
    def in_proposition_regime(self) -> bool:
        """True when gamma < 1/4 (the regime with a closed-form fast-time dimension)."""
        return self.gamma < 0.25

    def __call__(self, t):
        return cantor_value(self.gamma, self.depth, t)

    @property
    def descriptor(self):
        return f"cantor:gamma={self.gamma!r},depth={self.depth}"


@dataclass(frozen=True)
class Loud(DriftSpec):
    """Lacunary triangle-wave series ``sum_k 2**(-2 A alpha k) g0(2**(2 A k) t)``."""

    alpha: float
    A: int
    terms: int = 6

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ConfigurationError(f"alpha must lie in (0, 1), got {self.alpha}")
        if int(self.A) != self.A or self.A < 1:
            raise ConfigurationError(f"A must be a positive integer, got {self.A}")
        if not 2 * self.A * (1 - self.alpha) > 1:
            raise ConfigurationError(
                f"Loud series needs 2A(1 - alpha) > 1, got A={self.A}, alpha={self.alpha}"
            )
        if self.terms < 1:
            raise ConfigurationError(f"terms must be >= 1, got {self.terms}")

    def __call__(self, t):
        return loud_value(self.alpha, self.A, self.terms, t)

    @property
    def descriptor(self):
        return f"loud:alpha={self.alpha!r},A={self.A},terms={self.terms}"


@dataclass(frozen=True, eq=False)
class Tabulated(DriftSpec):
    """Piecewise-linear interpolation of a table ``(t, f(t))`` at dyadic times."""

    t: np.ndarray
    values: np.ndarray
    source: str = field(default="<memory>")

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        if t.ndim != 1 or t.shape != v.shape or t.size < 2:
            raise ConfigurationError("table needs two equal-length columns with >= 2 rows")
        if np.any(np.diff(t) <= 0):
            raise ConfigurationError("table times must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise ConfigurationError("table entries must be finite")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)

    def __call__(self, t):
        return np.interp(np.asarray(t, dtype=np.float64), self.t, self.values)

    @property
    def descriptor(self):
        return f"table:path={self.source}"

    @classmethod
    def load(cls, path) -> "Tabulated":
        data = np.loadtxt(path, ndmin=2)
        if data.shape[1] != 2:
            raise ConfigurationError(f"{path}: expected two columns, got {data.shape[1]}")
        return cls(data[:, 0], data[:, 1], source=str(path))

    def save(self, path) -> None:
        np.savetxt(path, np.column_stack([self.t, self.values]), fmt="%.17g")


def _check_gamma(gamma):
    if not 0.0 < gamma < 0.5:
        raise ConfigurationError(f"Cantor gamma must lie in (0, 1/2), got {gamma!r}")


def _number(text):
    return float(Fraction(text)) if "/" in text else float(text)


def parse_drift(spec: str) -> DriftSpec:
    """Parse ``name[:key=value,...]`` into a drift.

    >>> parse_drift("cantor:gamma=1/4,depth=12")
    Cantor(gamma=0.25, depth=12)
    """
    name, _, rest = spec.strip().partition(":")
    kw = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise UsageError(f"malformed drift parameter {item!r} in {spec!r}")
        kw[key.strip()] = val.strip()
    name = name.lower()
    try:
        if name == "zero":
            return Zero()
        if name == "linear":
            return Linear(_number(kw.get("c", "1")))
        if name == "cantor":
            return Cantor(_number(kw["gamma"]), int(kw.get("depth", 30)))
        if name == "loud":
            return Loud(_number(kw["alpha"]), int(kw["A"]), int(kw.get("terms", 6)))
        if name in ("table", "tabulated"):
            return Tabulated.load(Path(kw["path"]))
    except KeyError as exc:
        raise UsageError(f"drift {spec!r} is missing parameter {exc.args[0]!r}") from None
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise UsageError(f"cannot parse drift {spec!r}: {exc}") from None
    raise UsageError(f"unknown drift kind {name!r}")


# ---------------------------------------------------------------- Cantor ---


def cantor_value(gamma: float, depth: int, t):
    """Depth-``depth`` approximation of the middle-(1-2γ) Cantor function.

    Follows the self-similar recursion down ``depth`` generations and
    interpolates linearly inside the remaining generation-``depth``
    component, so the truncation error is at most ``2**-depth``. Values are
    0 for ``t <= 0`` and 1 for ``t >= 1``. Scalars in, scalars out.
    """
    _check_gamma(gamma)
    scalar = np.ndim(t) == 0
    x = np.clip(np.asarray(t, dtype=np.float64), 0.0, 1.0).ravel().copy()
    out = (x >= 1.0).astype(np.float64)
    live = (x > 0.0) & (x < 1.0)
    scale = 1.0
    hi = 1.0 - gamma
    for _ in range(depth):
        left = live & (x <= gamma)
        right = live & (x >= hi)
        mid = live & ~left & ~right
        out[mid | right] += 0.5 * scale
        x[left] /= gamma
        x[right] = (x[right] - hi) / gamma
        # rounding error grows by 1/gamma per generation; keep x in [0, 1]
        np.clip(x, 0.0, 1.0, out=x)
        live &= ~mid
        scale *= 0.5
        if not live.any():
            break
    out[live] += scale * x[live]
    out = out.reshape(np.shape(t))
    return float(out) if scalar else out


@dataclass(frozen=True)
class IntervalList:
    """Sorted, disjoint closed subintervals of ``[0, 1]``."""

    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        left = np.asarray(self.left, dtype=np.float64)
        right = np.asarray(self.right, dtype=np.float64)
        if left.shape != right.shape or np.any(left >= right):
            raise ConfigurationError("each interval needs left < right")
        if left.size and (left[0] < 0 or right[-1] > 1 or np.any(left[1:] <= right[:-1])):
            raise ConfigurationError("intervals must be sorted, disjoint and inside [0, 1]")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    def __len__(self):
        return self.left.size

    def __iter__(self):
        return iter(zip(self.left.tolist(), self.right.tolist()))

    @property
    def total_length(self) -> float:
        return float(np.sum(self.right - self.left))

    def gaps(self) -> list[tuple[float, float]]:
        """Open intervals of ``[0, 1]`` between consecutive components."""
        return list(zip(self.right[:-1].tolist(), self.left[1:].tolist()))

    def locate(self, t) -> np.ndarray:
        """Index of the component containing each ``t``, or -1."""
        t = np.asarray(t, dtype=np.float64)
        i = np.searchsorted(self.left, t, side="right") - 1
        ok = (i >= 0) & (t <= self.right[np.clip(i, 0, None)])
        return np.where(ok, i, -1)


def cantor_components(gamma: float, n: int) -> IntervalList:
    """The ``2**n`` generation-``n`` components of the middle-(1-2γ) Cantor set."""
    _check_gamma(gamma)
    if n < 0:
        raise ConfigurationError(f"n must be >= 0, got {n}")
    length = gamma**n
    if length == 0.0 or n > 40:
        raise DomainError(f"gamma**n underflows or is too fine to enumerate (gamma={gamma}, n={n})")
    left = np.zeros(1)
    for g in range(n):
        left = np.concatenate([left, left + (1.0 - gamma) * gamma**g])
    left.sort()
    return IntervalList(left, np.minimum(left + length, 1.0))


# ------------------------------------------------------------------ Loud ---


def triangle_wave(x):
    """``g0``: 0 at even integers, 1 at odd integers, linear in between."""
    return 1.0 - np.abs(np.mod(x, 2.0) - 1.0)


def loud_value(alpha: float, A: int, terms: int, t):
    Loud(alpha, A, terms)  # validates
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    for k in range(1, terms + 1):
        out += 2.0 ** (-2 * A * alpha * k) * triangle_wave(2.0 ** (2 * A * k) * t)
    return float(out) if scalar else out


# --------------------------------------------------------- Hölder probes ---


def holder_coefficient(f: DriftSpec, theta: float, grid_level: int) -> float:
    """Grid estimate of ``sup |f(t) - f(s)| / |t - s|**theta`` over ``[0, 1]``.

    Only grid pairs are examined, so the result is a lower bound for the true
    coefficient. Cost is quadratic in ``2**grid_level``.
    """
    if not 0.0 < theta <= 1.0:
        raise ConfigurationError(f"theta must lie in (0, 1], got {theta}")
    n = 2**grid_level
    v = f(np.arange(n + 1) / n)
    best = 0.0
    for d in range(1, n + 1):
        diff = np.abs(v[d:] - v[:-d]).max()
        if diff:
            best = max(best, diff / (d / n) ** theta)
    return float(best)


def reverse_holder_witness(
    f: DriftSpec,
    beta: float,
    c: float,
    t: float,
    h_max: float,
    grid_level: int,
    chunk: int = 1 << 15,
) -> float | None:
    """Smallest grid ``h <= h_max`` with ``|f(t+h) - f(t)| >= c h**beta``.

    Candidate ``h`` are positive multiples of ``2**-grid_level`` with
    ``t + h <= 1``. ``None`` means no witness at this resolution, which says
    nothing about smaller unresolved scales.
    """
    if not 0.0 < beta < 1.0 or c <= 0:
        raise ConfigurationError("need 0 < beta < 1 and c > 0")
    step = 2.0**-grid_level
    h_max = min(h_max, 1.0 - t)
    j_max = int(np.floor(h_max / step + 1e-9))
    ft = f.scalar(t)
    j0 = 1
    while j0 <= j_max:
        j = np.arange(j0, min(j0 + chunk, j_max + 1), dtype=np.float64)
        h = j * step
        hit = np.nonzero(np.abs(f(t + h) - ft) >= c * h**beta)[0]
        if hit.size:
            return float(h[hit[0]])
        j0 += chunk
    return None


def default_gamma1(gamma: float) -> float:
    """Midpoint of the admissible range ``gamma < gamma1 < 1/4``."""
    if not 0.0 < gamma < 0.25:
        raise ConfigurationError(f"gamma1 is only defined for gamma < 1/4, got {gamma}")
    return 0.5 * (gamma + 0.25)


class Sign(str, enum.Enum):
    PLUS = "PLUS"
    MINUS = "MINUS"
    BOTH = "BOTH"


def sign_set_indicator(f: DriftSpec, h: float, t: float) -> Sign:
    """Sign of ``f(t+h) - f(t)``; zero differences belong to both sign sets."""
    if h <= 0:
        raise DomainError(f"h must be positive, got {h}")
    d = f.scalar(t + h) - f.scalar(t)
    if d > 0:
        return Sign.PLUS
    if d < 0:
        return Sign.MINUS
    return Sign.BOTH


def cantor_dimension(gamma: float) -> float:
    _check_gamma(gamma)
    return -math.log(2.0) / math.log(gamma)
