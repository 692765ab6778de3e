"""Nested counts of flagged dyadic intervals and the limsup-fractal criterion."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy.special import log_ndtr

from .detect import l_flags, l_probability
from .ensemble import map_seeds, path_seeds
from .errors import ConfigurationError, ResolutionError
from .paths import SamplePath, sample_bm

__all__ = [
    "eta_n",
    "CountReport",
    "m_n_counts",
    "variance_report",
    "Verdict",
    "ConditionTable",
    "dimension_condition",
    "absorption_holds",
    "absorption_table",
    "l_covariance",
]

VACUOUS_MEAN = 1e-3


def eta_n(n: int) -> int:
    """Dependence range ``2n + 1``: level-``n`` windows further apart are independent."""
    return 2 * n + 1


@dataclass(frozen=True)
class CountReport:
    m: int
    n: int
    a: float
    epsilon: float
    per_interval_counts: np.ndarray
    p_n_hat: float = float("nan")
    p_n_analytic: float = float("nan")
    var_hat: float = float("nan")
    var_bound: float = float("nan")
    mean_hat: float = float("nan")
    mean_stderr: float = float("nan")
    var_stderr: float = float("nan")
    n_paths: int = 1

    @property
    def mean_analytic(self) -> float:
        return self.p_n_analytic * 2 ** (self.n - self.m)

    @property
    def vacuous(self) -> bool:
        """True when the expected count is so small that the variance test says nothing."""
        return self.mean_analytic < VACUOUS_MEAN

    @property
    def ratio(self) -> float:
        return float("nan") if self.vacuous else self.var_hat / self.var_bound

    def variance_ok(self, n_sigma: float = 3.0) -> bool:
        if self.vacuous:
            return True
        rel = self.var_stderr / self.var_hat if self.var_hat > 0 else 0.0
        return self.var_hat <= self.var_bound * (1.0 + n_sigma * rel)

    def mean_ok(self, n_sigma: float = 3.0) -> bool:
        return abs(self.mean_hat - self.mean_analytic) <= n_sigma * self.mean_stderr


def _check_levels(m, n):
    if not 2 <= m <= n:
        raise ConfigurationError(f"need 2 <= m <= n, got m={m}, n={n}")


def m_n_counts(path: SamplePath, m: int, n: int, a: float, epsilon: float = 0.0) -> CountReport:
    """For each level-``m`` interval, the number of flagged level-``n`` subintervals."""
    _check_levels(m, n)
    if path.level < n:
        raise ResolutionError(f"path level {path.level} is coarser than n={n}")
    flags = l_flags(path, n, a, epsilon).flags
    counts = flags.reshape(2**m, 2 ** (n - m)).sum(axis=1)
    return CountReport(m, n, a, epsilon, counts, p_n_analytic=l_probability(n, a, epsilon))


def _counts_for_seed(seed, level, m, n, a, epsilon):
    return m_n_counts(sample_bm(seed, level), m, n, a, epsilon).per_interval_counts


def variance_report(
    master_seed: int,
    n_paths: int,
    m: int,
    n: int,
    a: float,
    epsilon: float = 0.0,
    workers: int = 1,
) -> CountReport:
    """Ensemble mean and pooled variance of ``M_n(I)`` against ``(2n+1) p_n 2**(n-m)``.

    The mean's standard error is computed from per-path averages, which is
    robust to correlation between intervals of one path.
    """
    _check_levels(m, n)
    if n_paths < 200:
        raise ConfigurationError(f"n_paths must be >= 200, got {n_paths}")
    fn = partial(_counts_for_seed, level=n, m=m, n=n, a=a, epsilon=epsilon)
    counts = np.stack(map_seeds(fn, path_seeds(master_seed, n_paths), workers)).astype(np.float64)
    pooled = counts.ravel()
    per_path = counts.mean(axis=1)
    p_n = l_probability(n, a, epsilon)
    mean = float(pooled.mean())
    var = float(pooled.var(ddof=1))
    centred = pooled - mean
    m4 = float(np.mean(centred**4))
    var_se = math.sqrt(max(m4 - var * var, 0.0) / pooled.size)
    return CountReport(
        m,
        n,
        a,
        epsilon,
        counts[0].astype(np.int64),
        p_n_hat=mean / 2 ** (n - m),
        p_n_analytic=p_n,
        var_hat=var,
        var_bound=eta_n(n) * p_n * 2 ** (n - m),
        mean_hat=mean,
        mean_stderr=float(per_path.std(ddof=1) / math.sqrt(n_paths)),
        var_stderr=var_se,
        n_paths=n_paths,
    )


def _l_pair(seed, level, n, a, epsilon, k1, k2):
    f = l_flags(sample_bm(seed, level), n, a, epsilon).flags
    return float(f[k1]), float(f[k2])


def l_covariance(master_seed, n_paths, n, a, epsilon, k1, k2, workers=1) -> tuple[float, float]:
    """Empirical covariance of ``L(I_k1)`` and ``L(I_k2)`` at level ``n`` and its standard error."""
    fn = partial(_l_pair, level=n, n=n, a=a, epsilon=epsilon, k1=k1, k2=k2)
    x = np.array(map_seeds(fn, path_seeds(master_seed, n_paths), workers))
    prod = (x[:, 0] - x[:, 0].mean()) * (x[:, 1] - x[:, 1].mean())
    return float(prod.sum() / (n_paths - 1)), float(prod.std(ddof=1) / math.sqrt(n_paths))


class Verdict(str, enum.Enum):
    DECREASING = "DECREASING-TO-ZERO"
    DIVERGING = "DIVERGING"


@dataclass(frozen=True)
class ConditionTable:
    n: np.ndarray
    log_values: np.ndarray
    verdict: Verdict
    gamma_target: float
    a: float
    epsilon: float

    @property
    def values(self) -> np.ndarray:
        return np.exp(self.log_values)

    def rows(self):
        return list(zip(self.n.tolist(), self.values.tolist()))


def dimension_condition(gamma_target: float, a: float, epsilon: float, n_range=range(20, 401)) -> ConditionTable:
    """Tabulate ``2**((gamma-1) n) (2n+1) / p_n`` with the exact ``p_n``.

    The verdict is DECREASING-TO-ZERO when the second half of the sequence is
    strictly decreasing and the last value is below a thousandth of the first.
    Computed in log space so large ``n`` do not underflow.
    """
    if not 0.0 < gamma_target < 1.0:
        raise ConfigurationError(f"gamma_target must lie in (0, 1), got {gamma_target}")
    n = np.array(list(n_range), dtype=np.int64)
    if n.size < 2 or n.min() < 2:
        raise ConfigurationError("n_range needs at least two levels >= 2")
    nf = n.astype(np.float64)
    x = a * (1.0 + epsilon) * np.sqrt(2.0 * (nf * math.log(2.0) - np.log(nf)))
    log_p = math.log(2.0) + log_ndtr(-x)
    logs = (gamma_target - 1.0) * nf * math.log(2.0) + np.log(2.0 * nf + 1.0) - log_p
    tail = logs[n.size // 2 :]
    decreasing = bool(np.all(np.diff(tail) < 0)) and logs[-1] < logs[0] + math.log(1e-3)
    verdict = Verdict.DECREASING if decreasing else Verdict.DIVERGING
    return ConditionTable(n, logs, verdict, gamma_target, a, epsilon)


def absorption_holds(m: int, a: float, epsilon: float, c1: float) -> bool:
    """Whether ``a eps sqrt(2m log(2**m/m)) >= 2 c1 sqrt(log 2**m)`` at level ``m``."""
    lhs = a * epsilon * math.sqrt(2.0 * m * (m * math.log(2.0) - math.log(m)))
    return lhs >= 2.0 * c1 * math.sqrt(m * math.log(2.0))


def absorption_table(levels, a: float, epsilon: float, c1: float) -> list[tuple[int, bool]]:
    """Per level, whether the modulus term is absorbed by the ``epsilon`` slack."""
    return [(int(m), absorption_holds(m, a, epsilon, c1)) for m in levels]
