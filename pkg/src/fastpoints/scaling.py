"""Scaling exponents from per-level counts, closed-form dimensions, covering sums."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ConfigurationError, DomainError, FitError

__all__ = [
    "Correction",
    "ScalingFit",
    "DimResult",
    "fit_exponent",
    "sqrt_log_factor",
    "dim_fast",
    "dim_fast_zero",
    "dim_cantor",
    "dim_fast_cantor_drift",
    "dim_fbm_cantor_drift",
    "covering_sum",
    "covering_sums",
]


class Correction(str, enum.Enum):
    NONE = "NONE"
    SQRT_LOG = "SQRT_LOG"


def sqrt_log_factor(m) -> np.ndarray:
    """``sqrt(max(log(2**m / m), 1))``, the divisor used by ``SQRT_LOG``."""
    m = np.asarray(m, dtype=np.float64)
    return np.sqrt(np.maximum(m * math.log(2.0) - np.log(m), 1.0))


@dataclass(frozen=True)
class ScalingFit:
    levels: list
    counts: list
    correction: Correction
    slope: float
    intercept: float
    stderr: float
    r_squared: float

    def predict(self, m) -> np.ndarray:
        """Fitted (corrected) count at level ``m``."""
        return 2.0 ** (self.intercept + self.slope * np.asarray(m, dtype=np.float64))


def fit_exponent(levels, counts, correction: Correction | str = Correction.NONE) -> ScalingFit:
    """Least-squares slope of ``log2(count)`` against level.

    Levels with non-positive counts are dropped; at least three must remain.
    With ``SQRT_LOG`` each count is first divided by :func:`sqrt_log_factor`.
    """
    correction = Correction(correction)
    levels = [int(m) for m in levels]
    counts = [float(c) for c in counts]
    if len(levels) != len(counts):
        raise FitError("levels and counts differ in length", levels, counts)
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise FitError("levels must be strictly increasing", levels, counts)
    m = np.array(levels, dtype=np.float64)
    c = np.array(counts)
    keep = c > 0
    if keep.sum() < 3:
        raise FitError(f"need >= 3 levels with positive counts, have {int(keep.sum())}", levels, counts)
    m, c = m[keep], c[keep]
    if correction is Correction.SQRT_LOG:
        c = c / sqrt_log_factor(m)
    y = np.log2(c)
    x = m - m.mean()
    sxx = float(x @ x)
    slope = float(x @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * m.mean())
    resid = y - (intercept + slope * m)
    dof = len(y) - 2
    ss_res = float(resid @ resid)
    stderr = math.sqrt(ss_res / dof / sxx) if dof > 0 else 0.0
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(levels, counts, correction, slope, intercept, stderr, min(max(r2, 0.0), 1.0))


@dataclass(frozen=True)
class DimResult:
    """A closed-form dimension. ``value`` is ``None`` when the formula's
    hypothesis fails (``condition_ok`` is then False)."""

    value: float | None
    formula_id: str
    condition_ok: bool = True


def _unit(x, name):
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {x}")


def dim_fast(a: float) -> DimResult:
    _unit(a, "a")
    return DimResult(1.0 - a * a, "fast")


def dim_fast_zero(a: float) -> DimResult:
    if not 0.0 < a <= 1.0:
        raise DomainError(f"a must lie in (0, 1], got {a}")
    return DimResult(max(0.5 - a * a, 0.0), "fast_zero")


def dim_cantor(gamma: float) -> DimResult:
    if not 0.0 < gamma < 0.5:
        raise DomainError(f"gamma must lie in (0, 1/2), got {gamma}")
    return DimResult(-math.log(2.0) / math.log(gamma), "cantor")


def dim_fast_cantor_drift(a: float, gamma: float) -> DimResult:
    _unit(a, "a")
    if not 0.0 < gamma < 0.25:
        raise DomainError(f"gamma must lie in (0, 1/4), got {gamma}")
    return DimResult(max(dim_fast(a).value, dim_cantor(gamma).value), "fast_cantor_drift")


def dim_fbm_cantor_drift(a: float, alpha: float, hurst: float) -> DimResult:
    """Fast-time dimension of fBm minus a middle-``alpha`` Cantor function.

    Valid only when ``alpha > 1 - 2**(1 - 1/H)``; otherwise the result carries
    ``value=None`` and ``condition_ok=False``.
    """
    _unit(a, "a")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if not 0.0 < hurst < 1.0:
        raise DomainError(f"hurst must lie in (0, 1), got {hurst}")
    if not alpha > 1.0 - 2.0 ** (1.0 - 1.0 / hurst):
        return DimResult(None, "fbm_cantor_drift", condition_ok=False)
    cantor = math.log(2.0) / (math.log(2.0) - math.log(1.0 - alpha))
    return DimResult(max(1.0 - a * a, cantor), "fbm_cantor_drift")


def covering_sums(frequencies: Mapping[int, np.ndarray], gamma_exp: float) -> dict:
    """Per-level summands ``sum_k 2**(-j gamma_exp) * freq[k]``."""
    if gamma_exp < 0:
        raise ConfigurationError(f"gamma_exp must be >= 0, got {gamma_exp}")
    return {
        int(j): float(2.0 ** (-j * gamma_exp) * np.sum(np.asarray(freq, dtype=np.float64)))
        for j, freq in frequencies.items()
    }


def covering_sum(frequencies: Mapping[int, np.ndarray], gamma_exp: float, i_start: int) -> float:
    """Partial covering sum over the available levels ``j >= i_start``.

    ``frequencies[j]`` holds the empirical joint flag frequency of each
    level-``j`` interval. Levels absent from the mapping contribute nothing,
    so for divergent sums this is the partial sum over what was measured.
    """
    terms = covering_sums({j: f for j, f in frequencies.items() if j >= i_start}, gamma_exp)
    return float(sum(terms[j] for j in sorted(terms)))
