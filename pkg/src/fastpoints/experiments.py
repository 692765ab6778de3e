"""Experiment presets, flat ``key = value`` configuration and CSV output.

Every preset is a deterministic function of its :class:`ExperimentConfig`:
path ``i`` uses ``derive_seed(master_seed, i)``, per-path statistics come
back in index order and are reduced sequentially, so the CSV bytes do not
depend on ``workers``.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from functools import partial
from pathlib import Path

import numpy as np

from . import detect, limsup, measures, scaling
from .drift import Cantor, Loud, Zero, holder_coefficient, parse_drift
from .ensemble import map_seeds, path_seeds
from .errors import ConfigurationError, FitError, UsageError
from .paths import MAX_FBM_LEVEL, MAX_LEVEL, apply_drift, sample_bm, sample_fbm

__all__ = [
    "PRESETS",
    "CSV_HEADER",
    "ExperimentConfig",
    "ResultRow",
    "ValidationReport",
    "load_config",
    "parse_config_text",
    "validate",
    "run",
    "rows_to_csv",
]

PRESETS = (
    "orey-taylor",
    "zero-intersection",
    "cantor-drift",
    "loud-drift",
    "fbm",
    "holder-sandwich",
    "covering",
    "jlab",
    "limsup-variance",
    "dims",
)

CSV_HEADER = ("preset", "level", "stat", "value", "stderr", "oracle", "n_paths", "seed")

SEED_ENV = "FASTPOINTS_SEED"
U64_MAX = 2**64 - 1


def _default_seed():
    raw = os.environ.get(SEED_ENV)
    return int(raw) if raw else 0


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str = "orey-taylor"
    master_seed: int = field(default_factory=_default_seed)
    n_paths: int = 100
    level_min: int = 8
    level_max: int = 12
    a: float = 0.5
    epsilon: float = 0.0
    drift: str = "zero"
    hurst: float | None = None
    gamma_exp: float | None = None
    output_path: str | None = None
    workers: int = 1

    @property
    def levels(self) -> list[int]:
        return list(range(self.level_min, self.level_max + 1))

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


@dataclass(frozen=True)
class ResultRow:
    preset: str
    level: int
    stat: str
    value: float
    stderr: float = 0.0
    oracle: float | None = None
    n_paths: int = 0
    seed: int = 0

    def as_csv(self) -> list[str]:
        return [
            self.preset,
            str(self.level),
            self.stat,
            _fmt(self.value),
            _fmt(self.stderr),
            "" if self.oracle is None else _fmt(self.oracle),
            str(self.n_paths),
            str(self.seed),
        ]


def _fmt(x):
    return format(float(x), ".17g")


# ----------------------------------------------------------- configuration ---

_KEY_ALIASES = {"seed": "master_seed", "paths": "n_paths", "out": "output_path"}
_FIELD_TYPES = {
    "preset": str,
    "master_seed": int,
    "n_paths": int,
    "level_min": int,
    "level_max": int,
    "a": float,
    "epsilon": float,
    "drift": str,
    "hurst": float,
    "gamma_exp": float,
    "output_path": str,
    "workers": int,
}


def _convert(key, raw):
    typ = _FIELD_TYPES[key]
    try:
        if typ is float:
            return float(Fraction(raw)) if "/" in raw else float(raw)
        return typ(raw)
    except ValueError:
        raise UsageError(f"cannot read {key} = {raw!r} as {typ.__name__}") from None


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, val = line.partition("=")
        if not eq:
            raise UsageError(f"config line {lineno}: expected key = value, got {line!r}")
        key = _KEY_ALIASES.get(key.strip(), key.strip().replace("-", "_"))
        if key == "levels":
            lo, _, hi = val.strip().partition(":")
            out["level_min"], out["level_max"] = int(lo), int(hi or lo)
            continue
        if key not in _FIELD_TYPES:
            raise UsageError(f"config line {lineno}: unknown key {key!r}")
        out[key] = _convert(key, val.strip())
    return out


def load_config(path) -> dict:
    return parse_config_text(Path(path).read_text())


@dataclass(frozen=True)
class ValidationReport:
    violations: list
    config: dict

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        out = [f"{k} = {v}" for k, v in self.config.items()]
        out += [f"violation: {v}" for v in self.violations] or ["ok"]
        return out


def validate(config: ExperimentConfig) -> ValidationReport:
    """List every problem with ``config`` without running anything."""
    v = []
    if config.preset not in PRESETS:
        v.append(f"unknown preset {config.preset!r}; choose from {', '.join(PRESETS)}")
    if not 0 <= config.master_seed <= U64_MAX:
        v.append("master_seed must be a 64-bit unsigned integer")
    if config.n_paths < 1:
        v.append("n_paths must be >= 1")
    if config.workers < 1:
        v.append("workers must be >= 1")
    if config.level_min > config.level_max:
        v.append(f"level_min {config.level_min} exceeds level_max {config.level_max}")
    if config.level_max > MAX_LEVEL:
        v.append(f"level_max {config.level_max} exceeds {MAX_LEVEL}")
    if config.level_min < 2:
        v.append("level_min must be >= 2")
    if config.a < 0:
        v.append("a must be >= 0")
    if config.epsilon < 0:
        v.append("epsilon must be >= 0")
    if config.hurst is not None and not 0 < config.hurst < 1:
        v.append("hurst must lie in (0, 1)")
    try:
        drift = parse_drift(config.drift)
    except (ConfigurationError, UsageError, OSError) as exc:
        v.append(f"drift: {exc}")
        drift = None
    p = config.preset
    if p in ("zero-intersection", "covering") and config.level_max + 3 > MAX_LEVEL:
        v.append(f"{p} samples at level_max + 3, which must be <= {MAX_LEVEL}")
    if p == "jlab" and config.level_max + 4 > MAX_LEVEL:
        v.append(f"jlab samples at level_max + 4, which must be <= {MAX_LEVEL}")
    if p == "fbm":
        if config.hurst is None:
            v.append("fbm preset needs hurst")
        if config.level_max > MAX_FBM_LEVEL:
            v.append(f"fbm preset needs level_max <= {MAX_FBM_LEVEL}")
    if p == "cantor-drift" and drift is not None and not isinstance(drift, Cantor):
        v.append("cantor-drift preset needs a cantor drift")
    if p == "loud-drift" and drift is not None and not isinstance(drift, Loud):
        v.append("loud-drift preset needs a loud drift")
    if p == "holder-sandwich" and config.level_max > 16:
        v.append("holder-sandwich estimates a Hölder coefficient quadratically; keep level_max <= 16")
    if p == "limsup-variance" and config.n_paths < 200:
        v.append("limsup-variance needs n_paths >= 200")
    if p in ("orey-taylor", "cantor-drift", "loud-drift", "fbm", "dims") and config.a > 1:
        v.append("a must lie in [0, 1] for this preset")
    return ValidationReport(v, asdict(config))


# ------------------------------------------------------------------ helpers ---


def _mean_se(x):
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    mean = x.mean(axis=0)
    se = x.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros_like(mean)
    return mean, se


def _fit_row(cfg, seed_levels, counts, stat, correction, oracle, stderr_from_fit=True):
    try:
        fit = scaling.fit_exponent(seed_levels, counts, correction)
    except FitError:
        return []
    return [ResultRow(cfg.preset, cfg.level_max, stat, fit.slope, fit.stderr, oracle, cfg.n_paths, cfg.master_seed)]


def _level_rows(cfg, stat, means, ses, oracles=None):
    rows = []
    for i, m in enumerate(cfg.levels):
        rows.append(
            ResultRow(
                cfg.preset,
                m,
                stat,
                float(means[i]),
                float(ses[i]),
                None if oracles is None else float(oracles[i]),
                cfg.n_paths,
                cfg.master_seed,
            )
        )
    return rows


def _ensemble(cfg, fn):
    return np.stack(
        [np.asarray(r, dtype=np.float64) for r in map_seeds(fn, path_seeds(cfg.master_seed, cfg.n_paths), cfg.workers)]
    )


# -------------------------------------------------------- per-path kernels ---


def _l_counts(seed, level, levels, a, epsilon, drift_spec, hurst):
    path = sample_bm(seed, level) if hurst is None else sample_fbm(seed, hurst, level)
    if drift_spec != "zero":
        path = apply_drift(path, parse_drift(drift_spec))
    return [detect.count(detect.l_flags(path, m, a, epsilon)) for m in levels]


def _zero_inter_counts(seed, level, levels, a, c):
    path = sample_bm(seed, level)
    out = []
    for j in levels:
        z = detect.zero_near_flags(path, j, c)
        s = detect.sup_flags(path, j, a)
        out += [z.count(), detect.intersect_flags(z, s).count()]
    return out


def _inter_bits(seed, level, levels, a, c):
    path = sample_bm(seed, level)
    return np.concatenate(
        [detect.intersect_flags(detect.zero_near_flags(path, j, c), detect.sup_flags(path, j, a)).flags for j in levels]
    )


def _fbm_stats(seed, hurst, level, levels, a, epsilon):
    path = sample_fbm(seed, hurst, level)
    v = path.values
    n1 = 2**level
    out = []
    for m in levels:
        d = 2 ** (level - m)
        inc = v[d : n1 + d] - v[:n1]
        out.append(float(np.mean(inc * inc)))
    out += [detect.count(detect.l_flags(path, m, a, epsilon)) for m in levels]
    return out


def _sandwich(seed, level, levels, a, epsilon, drift_spec, c0):
    path = sample_bm(seed, level)
    drift = parse_drift(drift_spec)
    x = apply_drift(path, drift)
    return [detect.holder_sandwich(path, drift, m, a, c0, epsilon, drifted=x).violations for m in levels]


# ------------------------------------------------------------------ presets ---


def _orey_taylor(cfg):
    drift = parse_drift(cfg.drift)
    fn = partial(
        _l_counts,
        level=cfg.level_max,
        levels=cfg.levels,
        a=cfg.a,
        epsilon=cfg.epsilon,
        drift_spec=cfg.drift,
        hurst=None,
    )
    mean, se = _mean_se(_ensemble(cfg, fn))
    oracle = [detect.expected_l_count(m, cfg.a, cfg.epsilon) for m in cfg.levels] if isinstance(drift, Zero) else None
    rows = _level_rows(cfg, "mean_fast_count", mean, se, oracle)
    target = scaling.dim_fast(min(cfg.a, 1.0)).value
    if isinstance(drift, Cantor) and drift.in_proposition_regime and cfg.a <= 1:
        target = scaling.dim_fast_cantor_drift(cfg.a, drift.gamma).value
    elif isinstance(drift, Loud) and drift.alpha < 0.5:
        target = 1.0
    rows += _fit_row(cfg, cfg.levels, mean, "exponent_none", "NONE", target)
    rows += _fit_row(cfg, cfg.levels, mean, "exponent_sqrt_log", "SQRT_LOG", target)
    if oracle is not None:
        rows += _fit_row(cfg, cfg.levels, oracle, "analytic_exponent_sqrt_log", "SQRT_LOG", target)
    return rows


def _zero_intersection(cfg):
    c = detect.default_zero_c(None)
    fn = partial(_zero_inter_counts, level=cfg.level_max + 3, levels=cfg.levels, a=cfg.a, c=c)
    mean, se = _ensemble_pairs(cfg, fn)
    zero_oracle = [detect.expected_zero_count(j, c) for j in cfg.levels]
    rows = _level_rows(cfg, "mean_zero_count", mean[0], se[0], zero_oracle)
    rows += _level_rows(cfg, "mean_intersect_count", mean[1], se[1])
    rows += _fit_row(cfg, cfg.levels, mean[0], "zero_exponent_sqrt_log", "SQRT_LOG", 0.5)
    target = scaling.dim_fast_zero(cfg.a).value if 0 < cfg.a <= 1 else None
    rows += _fit_row(cfg, cfg.levels, mean[1], "intersect_exponent_none", "NONE", target)
    return rows


def _ensemble_pairs(cfg, fn):
    data = _ensemble(cfg, fn)
    mean, se = _mean_se(data)
    return mean.reshape(-1, 2).T, se.reshape(-1, 2).T


def _fbm(cfg):
    h = cfg.hurst
    fn = partial(_fbm_stats, hurst=h, level=cfg.level_max, levels=cfg.levels, a=cfg.a, epsilon=cfg.epsilon)
    mean, se = _mean_se(_ensemble(cfg, fn))
    k = len(cfg.levels)
    lags = [2.0**-m for m in cfg.levels]
    rows = _level_rows(cfg, "incr_second_moment", mean[:k], se[:k], [g ** (2 * h) for g in lags])
    slope = np.polyfit(np.log(lags), np.log(mean[:k]), 1)[0] if k >= 2 else float("nan")
    if k >= 2:
        rows.append(ResultRow(cfg.preset, cfg.level_max, "incr_slope", float(slope), 0.0, 2 * h, cfg.n_paths, cfg.master_seed))
    rows += _level_rows(cfg, "mean_fast_count", mean[k:], se[k:])
    rows += _fit_row(cfg, cfg.levels, mean[k:], "exponent_sqrt_log", "SQRT_LOG", scaling.dim_fast(min(cfg.a, 1)).value)
    return rows


def _holder_sandwich(cfg):
    spec = cfg.drift if cfg.drift != "zero" else "cantor:gamma=1/4"
    c0 = holder_coefficient(parse_drift(spec), 0.5, cfg.level_max)
    fn = partial(_sandwich, level=cfg.level_max, levels=cfg.levels, a=cfg.a, epsilon=cfg.epsilon, drift_spec=spec, c0=c0)
    data = _ensemble(cfg, fn)
    rows = _level_rows(cfg, "violations", data.sum(axis=0), np.zeros(len(cfg.levels)), [0.0] * len(cfg.levels))
    rows.append(ResultRow(cfg.preset, cfg.level_max, "holder_c0", c0, 0.0, None, cfg.n_paths, cfg.master_seed))
    return rows


def _covering(cfg):
    c = detect.default_zero_c(None)
    fn = partial(_inter_bits, level=cfg.level_max + 3, levels=cfg.levels, a=cfg.a, c=c)
    freq = _ensemble(cfg, fn).mean(axis=0)
    per_level, pos = {}, 0
    for j in cfg.levels:
        per_level[j] = freq[pos : pos + 2**j]
        pos += 2**j
    g = cfg.gamma_exp if cfg.gamma_exp is not None else max(0.5 - cfg.a**2, 0.0) + 0.1
    return [
        ResultRow(cfg.preset, i, "covering_sum", scaling.covering_sum(per_level, g, i), 0.0, None, cfg.n_paths, cfg.master_seed)
        for i in cfg.levels
    ]


def _jlab(cfg):
    drift = parse_drift(cfg.drift)
    mu = measures.uniform_measure(2 ** min(cfg.level_min, 10))
    level = cfg.level_max + 4
    rows = []
    for ell in cfg.levels:
        h = 2.0**-ell
        j = measures.j_mu_samples(cfg.master_seed, cfg.n_paths, level, mu, h, cfg.a, drift, cfg.workers)
        est = measures.JEstimate.from_samples(j)
        pz = measures.paley_zygmund_check(est)
        exact = measures.j_mu_exact_mean_a0(mu, level, h) if cfg.a == 0 and isinstance(drift, Zero) else None
        for stat, val, se, orc in (
            ("ej", est.ej, est.stderr_ej, exact),
            ("ej2", est.ej2, est.stderr_ej2, None),
            ("p_positive", est.p_positive, math.sqrt(est.p_positive * (1 - est.p_positive) / est.n_paths), None),
            ("pz_lower", est.pz_lower, 0.0, None),
            ("pz_margin", 0.0 if pz.inconclusive else pz.margin, 0.0 if pz.inconclusive else pz.stderr, None),
        ):
            rows.append(ResultRow(cfg.preset, ell, stat, val, se, orc, cfg.n_paths, cfg.master_seed))
    return rows


def _limsup_variance(cfg):
    m, n = cfg.level_min, cfg.level_max
    rep = limsup.variance_report(cfg.master_seed, cfg.n_paths, m, n, cfg.a, cfg.epsilon, cfg.workers)
    out = [
        ("mean_count", rep.mean_hat, rep.mean_stderr, rep.mean_analytic),
        ("var_count", rep.var_hat, rep.var_stderr, rep.var_bound),
        ("p_n", rep.p_n_hat, rep.mean_stderr / 2 ** (n - m), rep.p_n_analytic),
    ]
    return [ResultRow(cfg.preset, n, s, v, se, o, cfg.n_paths, cfg.master_seed) for s, v, se, o in out]


def _dims(cfg):
    drift = parse_drift(cfg.drift)
    gamma = drift.gamma if isinstance(drift, Cantor) else 1.0 / 9.0
    a = cfg.a
    rows = [("dim_fast", scaling.dim_fast(a))]
    if a > 0:
        rows.append(("dim_fast_zero", scaling.dim_fast_zero(a)))
    rows.append(("dim_cantor", scaling.dim_cantor(gamma)))
    if gamma < 0.25:
        rows.append(("dim_fast_cantor_drift", scaling.dim_fast_cantor_drift(a, gamma)))
    if cfg.hurst is not None:
        res = scaling.dim_fbm_cantor_drift(a, 1.0 - 2.0 * gamma, cfg.hurst)
        rows.append(("dim_fbm_cantor_drift", res))
    return [
        ResultRow(cfg.preset, 0, stat, float("nan") if r.value is None else r.value, 0.0, None, 0, cfg.master_seed)
        for stat, r in rows
        if r.condition_ok
    ]


_RUNNERS = {
    "orey-taylor": _orey_taylor,
    "zero-intersection": _zero_intersection,
    "cantor-drift": _orey_taylor,
    "loud-drift": _orey_taylor,
    "fbm": _fbm,
    "holder-sandwich": _holder_sandwich,
    "covering": _covering,
    "jlab": _jlab,
    "limsup-variance": _limsup_variance,
    "dims": _dims,
}


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.as_csv())
    return buf.getvalue()


def run(config: ExperimentConfig) -> list[ResultRow]:
    """Run a preset; write CSV to ``config.output_path`` when set."""
    report = validate(config)
    if not report.ok:
        raise ConfigurationError("; ".join(report.violations))
    rows = _RUNNERS[config.preset](config)
    for r in rows:
        if not (math.isfinite(r.value) and math.isfinite(r.stderr)):
            raise FloatingPointError(f"non-finite result in row {r}")
    if config.output_path:
        Path(config.output_path).write_text(rows_to_csv(rows))
    return rows
