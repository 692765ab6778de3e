"""Discrete probability measures and the functionals of the second-moment method.

Atomless measures are approximated by finitely many atoms. Each measure
carries a ``resolution``: the width of the cell an atom stands for (the
component length for Cantor measures, the grid spacing for the uniform
proxy). Singular integrals such as ``S_h`` approach atoms no closer than half
a cell, which is what keeps them finite and comparable with their
continuous counterparts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy.special import erfc

from .drift import DriftSpec, Sign, Zero, cantor_components
from .ensemble import map_seeds, path_seeds
from .errors import ConfigurationError, DegenerateMeasureError, ResolutionError
from .paths import sample_bm

__all__ = [
    "DiscreteMeasure",
    "cantor_natural_measure",
    "uniform_measure",
    "measure_from_flags",
    "a_eta",
    "s_h",
    "s_tilde_h",
    "lemma_bound",
    "energy",
    "gaussian_tail_q",
    "mills_lower",
    "mills_upper",
    "phi",
    "phi_lower_bound",
    "sign_set_masses",
    "select_sign_set",
    "JEstimate",
    "j_mu_estimate",
    "j_mu_samples",
    "j_mu_exact_mean_a0",
    "PZReport",
    "paley_zygmund_check",
]


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    positions: np.ndarray
    weights: np.ndarray
    label: str = ""
    resolution: float = 0.0

    def __post_init__(self):
        t = np.asarray(self.positions, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.float64)
        if t.ndim != 1 or t.shape != w.shape or t.size == 0:
            raise DegenerateMeasureError("positions and weights must be equal-length 1-d arrays")
        if np.any(np.diff(t) <= 0):
            raise DegenerateMeasureError("atom positions must be strictly increasing")
        if t[0] < 0 or t[-1] > 1:
            raise DegenerateMeasureError("atoms must lie in [0, 1]")
        if np.any(w <= 0):
            raise DegenerateMeasureError("weights must be positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise DegenerateMeasureError(f"weights sum to {w.sum()!r}, not 1")
        t.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "positions", t)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.positions.size

    def mass(self, lo: float, hi: float) -> float:
        """``mu[lo, hi]`` (closed interval)."""
        i = np.searchsorted(self.positions, lo, side="left")
        j = np.searchsorted(self.positions, hi, side="right")
        return float(self.weights[i:j].sum())

    def restrict(self, mask) -> "DiscreteMeasure":
        """``mu(A ∩ .) / mu(A)`` for the atom subset selected by ``mask``."""
        mask = np.asarray(mask, dtype=bool)
        total = self.weights[mask].sum()
        if total <= 0:
            raise DegenerateMeasureError("restriction has zero mass")
        w = self.weights[mask] / total
        return DiscreteMeasure(self.positions[mask], w / w.sum(), self.label + "|restricted", self.resolution)

    def save(self, path) -> None:
        np.savetxt(path, np.column_stack([self.positions, self.weights]), fmt="%.17g")

    @classmethod
    def load(cls, path, label: str | None = None, resolution: float = 0.0) -> "DiscreteMeasure":
        data = np.loadtxt(path, ndmin=2)
        if data.shape[1] != 2:
            raise DegenerateMeasureError(f"{path}: expected two columns (t, w)")
        w = data[:, 1]
        return cls(data[:, 0], w / w.sum(), label or str(path), resolution)


def cantor_natural_measure(gamma: float, n: int) -> DiscreteMeasure:
    """Weight ``2**-n`` at the midpoint of each generation-``n`` Cantor component."""
    comps = cantor_components(gamma, n)
    mid = 0.5 * (comps.left + comps.right)
    return DiscreteMeasure(mid, np.full(mid.size, 2.0**-n), f"cantor(gamma={gamma},n={n})", gamma**n)


def uniform_measure(n: int) -> DiscreteMeasure:
    """Lebesgue proxy: ``n`` equal atoms at the cell midpoints ``(k + 1/2) / n``."""
    if n < 1:
        raise ConfigurationError("need at least one atom")
    return DiscreteMeasure((np.arange(n) + 0.5) / n, np.full(n, 1.0 / n), f"uniform(n={n})", 1.0 / n)


def measure_from_flags(flags) -> DiscreteMeasure:
    """Uniform measure on the midpoints of the flagged intervals of an ``IntervalFlags``."""
    k = np.flatnonzero(flags.flags)
    if k.size == 0:
        raise DegenerateMeasureError("no flagged intervals")
    step = 2.0**-flags.level
    return DiscreteMeasure((k + 0.5) * step, np.full(k.size, 1.0 / k.size), f"flags(level={flags.level})", step)


# ------------------------------------------------------------ Frostman ---


def a_eta(mu: DiscreteMeasure, eta: float, h_levels, t_grid_level: int) -> float:
    """Lower bound for ``sup_h sup_t mu[t-h, t+h] / h**eta``.

    ``h`` runs over ``2**-l`` for ``l`` in ``h_levels`` (only ``h <= 1/2``);
    ``t`` runs over the level-``t_grid_level`` grid in ``[h, 1-h]`` together
    with the points ``atom ± h``, where window masses jump.
    """
    if eta <= 0:
        raise ConfigurationError(f"eta must be positive, got {eta}")
    pos = mu.positions
    cum = np.concatenate([[0.0], np.cumsum(mu.weights)])
    grid = np.arange(2**t_grid_level + 1) * 2.0**-t_grid_level
    best = 0.0
    for ell in h_levels:
        h = 2.0**-ell
        if h > 0.5:
            continue
        t = np.concatenate([grid, pos + h, pos - h])
        t = t[(t >= h) & (t <= 1.0 - h)]
        if t.size == 0:
            continue
        mass = cum[np.searchsorted(pos, t + h, side="right")] - cum[np.searchsorted(pos, t - h, side="left")]
        best = max(best, float(mass.max()) / h**eta)
    return best


def _singular_sum(pos, w, s, upper):
    lo = np.searchsorted(pos, s, side="right")
    hi = np.searchsorted(pos, upper, side="right")
    if hi <= lo:
        return 0.0
    return float(np.sum(w[lo:hi] / np.sqrt(pos[lo:hi] - s)))


def _approach(mu, eps):
    return 0.5 * mu.resolution if eps is None else eps


def s_h(mu: DiscreteMeasure, h: float, eps: float | None = None) -> float:
    """``sup_{0 <= s <= h} sum_{s < t <= h} w / sqrt(t - s)``.

    Candidates are ``s = 0`` and ``s = atom - eps`` (default ``eps`` is half
    the measure's resolution), where the sum peaks for a discrete measure.
    """
    if not 0.0 < h <= 1.0:
        raise ConfigurationError(f"h must lie in (0, 1], got {h}")
    eps = _approach(mu, eps)
    pos, w = mu.positions, mu.weights
    cand = pos[pos <= h] - eps
    cand = np.concatenate([[0.0], cand[(cand >= 0.0) & (cand <= h)]])
    return max(_singular_sum(pos, w, s, h) for s in cand)


def s_tilde_h(mu: DiscreteMeasure, h: float, eps: float | None = None) -> float:
    """``sup_{0 <= s <= 1} sum_{s < t <= min(s+h, 1)} w / sqrt(t - s)``."""
    if not 0.0 < h <= 1.0:
        raise ConfigurationError(f"h must lie in (0, 1], got {h}")
    eps = _approach(mu, eps)
    pos, w = mu.positions, mu.weights
    cand = pos - eps
    cand = np.concatenate([[0.0], cand[cand >= 0.0]])
    return max(_singular_sum(pos, w, s, min(s + h, 1.0)) for s in cand)


def lemma_bound(a_eta_value: float, eta: float, h: float) -> float:
    """``2 e**eta / (2 eta - 1) * A_eta * h**(eta - 1/2)``, for ``eta > 1/2``."""
    if eta <= 0.5:
        raise ConfigurationError(f"the bound needs eta > 1/2, got {eta}")
    return 2.0 * math.exp(eta) / (2.0 * eta - 1.0) * a_eta_value * h ** (eta - 0.5)


def energy(mu: DiscreteMeasure, e: float) -> float:
    """Off-diagonal ``e``-energy ``sum_{i != j} w_i w_j |t_i - t_j|**-e``."""
    if e < 0:
        raise ConfigurationError(f"energy exponent must be >= 0, got {e}")
    t, w = mu.positions, mu.weights
    gap = np.abs(t[:, None] - t[None, :])
    off = ~np.eye(t.size, dtype=bool)
    if np.any(gap[off] == 0):
        raise DegenerateMeasureError("two distinct atoms share a position")
    kern = np.zeros_like(gap)
    kern[off] = gap[off] ** -e
    return float(w @ kern @ w)


# --------------------------------------------------------- Gaussian tails ---


def gaussian_tail_q(x):
    """Upper standard normal tail ``Q(x) = erfc(x / sqrt 2) / 2``."""
    return 0.5 * erfc(np.asarray(x, dtype=np.float64) / math.sqrt(2.0))


def mills_lower(x):
    """``x / (x**2 + 1) exp(-x**2 / 2)``, a lower bound for ``int_x^inf exp(-u**2/2) du``."""
    x = np.asarray(x, dtype=np.float64)
    return x / (x * x + 1.0) * np.exp(-0.5 * x * x)


def mills_upper(x):
    x = np.asarray(x, dtype=np.float64)
    return np.exp(-0.5 * x * x) / x


def phi(h: float, a: float) -> float:
    """``Q(a sqrt(2 log(1/h)))``: the chance that a normalised increment is a-fast."""
    if not 0.0 < h < 1.0:
        raise ConfigurationError(f"h must lie in (0, 1), got {h}")
    return float(gaussian_tail_q(a * math.sqrt(2.0 * math.log(1.0 / h))))


def phi_lower_bound(h: float, a: float) -> float:
    """``h**(a**2) a sqrt(log 1/h) / (sqrt(pi) (2 a**2 log(1/h) + 1))``."""
    L = math.log(1.0 / h)
    return h ** (a * a) * a * math.sqrt(L) / (math.sqrt(math.pi) * (2.0 * a * a * L + 1.0))


# ------------------------------------------------------------- sign sets ---


def sign_set_masses(f: DriftSpec, h: float, mu: DiscreteMeasure) -> tuple[float, float]:
    """``(mu(S-), mu(S+))`` with ``S-: f(t+h) <= f(t)`` and ``S+: f(t+h) >= f(t)``."""
    d = f(mu.positions + h) - f(mu.positions)
    w = mu.weights
    return float(w[d <= 0].sum()), float(w[d >= 0].sum())


def select_sign_set(f: DriftSpec, h: float, mu: DiscreteMeasure) -> Sign:
    """MINUS when ``mu(S-) >= mu(S+)`` (ties go to MINUS), else PLUS."""
    minus, plus = sign_set_masses(f, h, mu)
    return Sign.MINUS if minus >= plus else Sign.PLUS


# ------------------------------------------------------------ J functional ---


@dataclass(frozen=True)
class JEstimate:
    ej: float
    ej2: float
    p_positive: float
    pz_lower: float
    n_paths: int
    stderr_ej: float
    stderr_ej2: float = 0.0
    cov_ej_ej2: float = 0.0

    @classmethod
    def from_samples(cls, j) -> "JEstimate":
        j = np.asarray(j, dtype=np.float64)
        n = j.size
        j2 = j * j
        ej, ej2 = float(j.mean()), float(j2.mean())
        if n > 1:
            cov = np.cov(np.vstack([j, j2]), ddof=1) / n
            se1, se2, c12 = math.sqrt(cov[0, 0]), math.sqrt(cov[1, 1]), float(cov[0, 1])
        else:
            se1 = se2 = c12 = 0.0
        pz = ej * ej / ej2 if ej2 > 0 else 0.0
        return cls(ej, ej2, float(np.mean(j > 0)), min(pz, 1.0), n, se1, se2, c12)


def _snap(mu, level, h):
    step = 2.0**-level
    h_steps = h / step
    if h < step or abs(h_steps - round(h_steps)) > 1e-9:
        raise ResolutionError(f"h={h} is not a positive multiple of the grid step {step}")
    idx = np.rint(mu.positions / step).astype(np.int64)
    if np.max(np.abs(idx * step - mu.positions)) >= h / 8:
        raise ResolutionError(f"snapping atoms to level {level} moves them by h/8 or more")
    return idx, int(round(h_steps))


def _j_one_path(seed, level, idx, weights, h_steps, h, thr, upward, f_snapped):
    b = sample_bm(seed, level).values
    near = np.abs(b[idx] - f_snapped) < h
    inc = b[idx + h_steps] - b[idx]
    fast = inc > thr if upward else inc < -thr
    return float(np.dot(weights, near & fast))


def j_mu_samples(master_seed, n_paths, level, mu, h, a, f: DriftSpec | None = None, workers=1) -> np.ndarray:
    """Per-path values of the discretised J functional."""
    f = Zero() if f is None else f
    idx, h_steps = _snap(mu, level, h)
    if not 0.0 < h < 1.0:
        raise ConfigurationError(f"h must lie in (0, 1), got {h}")
    thr = a * math.sqrt(2.0 * h * math.log(1.0 / h))
    upward = select_sign_set(f, h, mu) is Sign.MINUS
    fn = partial(
        _j_one_path,
        level=level,
        idx=idx,
        weights=mu.weights,
        h_steps=h_steps,
        h=h,
        thr=thr,
        upward=upward,
        f_snapped=f(idx * 2.0**-level),
    )
    return np.array(map_seeds(fn, path_seeds(master_seed, n_paths), workers))


def j_mu_estimate(master_seed, n_paths, level, mu, h, a, f: DriftSpec | None = None, workers=1) -> JEstimate:
    """Monte Carlo moments of ``J = sum_i w_i 1{|X(s_i)| < h} 1{K_a(s_i, h)}``.

    Atoms are snapped to the level-``level`` grid. ``K_a`` asks for an
    upward increment ``B(s+h) - B(s) > a sqrt(2h log 1/h)`` when the selected
    sign set is MINUS and a downward one when it is PLUS.
    """
    if n_paths < 100:
        raise ConfigurationError(f"n_paths must be >= 100, got {n_paths}")
    return JEstimate.from_samples(j_mu_samples(master_seed, n_paths, level, mu, h, a, f, workers))


def j_mu_exact_mean_a0(mu: DiscreteMeasure, level: int, h: float) -> float:
    """``E J`` for zero drift and ``a = 0``: ``sum_i w_i P(|B(s_i)| < h) / 2`` at snapped ``s_i``."""
    idx, _ = _snap(mu, level, h)
    s = idx * 2.0**-level
    p = np.ones_like(s)
    pos = s > 0
    p[pos] = 1.0 - erfc(h / np.sqrt(2.0 * s[pos]))
    return float(np.dot(mu.weights, p) / 2.0)


@dataclass(frozen=True)
class PZReport:
    margin: float
    stderr: float
    passed: bool
    inconclusive: bool = False


def paley_zygmund_check(est: JEstimate, n_sigma: float = 3.0) -> PZReport:
    """Check ``P(J > 0) >= (E J)**2 / E J**2`` up to ``n_sigma`` standard errors."""
    if est.ej2 <= 0 or est.n_paths < 2:
        return PZReport(float("nan"), float("nan"), False, inconclusive=True)
    n = est.n_paths
    p = est.p_positive
    var_p = p * (1.0 - p) / n
    da = 2.0 * est.ej / est.ej2
    db = -est.ej**2 / est.ej2**2
    var_pz = da * da * est.stderr_ej**2 + db * db * est.stderr_ej2**2 + 2.0 * da * db * est.cov_ej_ej2
    se = math.sqrt(max(var_p + var_pz, 0.0))
    margin = p - est.pz_lower
    return PZReport(margin, se, margin >= -n_sigma * se)
