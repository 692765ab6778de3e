"""Acceptance gate: one check, and one printed PASS/FAIL line, per criterion.

Every Monte Carlo check runs from a fixed master seed, so the outcome is
reproducible. Tolerances are the criteria's own; nothing is tuned here.
"""

import math
import time

import numpy as np
import pytest

from fastpoints import cli
from fastpoints.detect import (
    count,
    default_zero_c,
    expected_l_count,
    holder_sandwich,
    intersect_flags,
    l_flags,
    sup_flags,
    zero_near_flags,
)
from fastpoints.drift import Cantor, Linear, Loud, Sign, Zero, cantor_components, holder_coefficient, reverse_holder_witness
from fastpoints.ensemble import map_seeds, path_seeds
from fastpoints.experiments import PRESETS
from fastpoints.limsup import Verdict, dimension_condition, variance_report
from fastpoints.measures import (
    DiscreteMeasure,
    a_eta,
    cantor_natural_measure,
    gaussian_tail_q,
    j_mu_estimate,
    j_mu_exact_mean_a0,
    lemma_bound,
    mills_lower,
    mills_upper,
    paley_zygmund_check,
    phi,
    s_h,
    s_tilde_h,
    select_sign_set,
    sign_set_masses,
    uniform_measure,
)
from fastpoints.paths import apply_drift, sample_bm, sample_fbm
from fastpoints.scaling import dim_fast_cantor_drift, fit_exponent

FAST_LEVELS = list(range(10, 19))
INTER_LEVELS = list(range(10, 17))


def _in(x, lo, hi):
    return lo <= x <= hi


# -- shared level-19 ensemble for criteria 2, 3 and 4 ------------------------


def _deep_counts(seed):
    p = sample_bm(seed, 19)
    c = default_zero_c(None)
    fast = [count(l_flags(p, m, 0.5)) for m in FAST_LEVELS]
    zero = [count(zero_near_flags(p, m, c)) for m in FAST_LEVELS]
    inter = [count(intersect_flags(zero_near_flags(p, j, c), sup_flags(p, j, 0.4))) for j in INTER_LEVELS]
    degenerate = count(intersect_flags(zero_near_flags(p, 16, c), sup_flags(p, 16, 0.9)))
    return fast + zero + inter + [degenerate]


@pytest.fixture(scope="module")
def deep():
    data = np.array(map_seeds(_deep_counts, path_seeds(2026, 500)), dtype=np.float64)
    k, j = len(FAST_LEVELS), len(INTER_LEVELS)
    return {
        "fast": data[:, :k].mean(axis=0),
        "zero": data[:, k : 2 * k].mean(axis=0),
        "inter": data[:, 2 * k : 2 * k + j].mean(axis=0),
        "degenerate": data[:, -1],
    }


# -- 1 -----------------------------------------------------------------------


def _l_counts(seed):
    p = sample_bm(seed, 12)
    return [count(l_flags(p, m, a)) for a in (0.3, 0.5, 0.7) for m in (8, 10, 12)]


def test_criterion_01_oracle_equivalence(record):
    t0 = time.perf_counter()
    data = np.array(map_seeds(_l_counts, path_seeds(101, 500)), dtype=np.float64)
    mean = data.mean(axis=0)
    se = data.std(axis=0, ddof=1) / math.sqrt(data.shape[0])
    z = []
    for i, (a, m) in enumerate((a, m) for a in (0.3, 0.5, 0.7) for m in (8, 10, 12)):
        z.append(abs(mean[i] - expected_l_count(m, a)) / se[i])
    elapsed = time.perf_counter() - t0
    ok = max(z) < 3 and elapsed < 120
    record(1, ok, f"max |z| = {max(z):.2f} over 9 (a, m) cells, {elapsed:.1f}s")
    assert ok


# -- 2 -----------------------------------------------------------------------


def test_criterion_02_orey_taylor_scaling(record, deep):
    mc = fit_exponent(FAST_LEVELS, deep["fast"], "SQRT_LOG").slope
    analytic = fit_exponent(FAST_LEVELS, [expected_l_count(m, 0.5) for m in FAST_LEVELS], "SQRT_LOG").slope
    mc_ok, an_ok = _in(mc, 0.63, 0.87), _in(analytic, 0.70, 0.78)
    record(
        2,
        mc_ok and an_ok,
        f"ensemble slope {mc:.4f} in [0.63, 0.87]: {mc_ok}; analytic slope {analytic:.4f} in [0.70, 0.78]: {an_ok}",
    )
    assert mc_ok, mc
    assert an_ok, f"analytic oracle slope {analytic:.4f} outside [0.70, 0.78] under the SQRT_LOG divisor"


# -- 3 -----------------------------------------------------------------------


def test_criterion_03_zero_set_scaling(record, deep):
    slope = fit_exponent(FAST_LEVELS, deep["zero"], "SQRT_LOG").slope
    ok = _in(slope, 0.40, 0.60)
    record(3, ok, f"near-zero count slope {slope:.4f} in [0.40, 0.60]")
    assert ok


# -- 4 -----------------------------------------------------------------------


def test_criterion_04_intersection_scaling(record, deep):
    slope = fit_exponent(INTER_LEVELS, deep["inter"], "NONE").slope
    degenerate = deep["degenerate"].mean()
    ok = _in(slope, 0.22, 0.46) and degenerate < 1
    record(4, ok, f"a=0.4 slope {slope:.4f} in [0.22, 0.46]; a=0.9 mean count at level 16 = {degenerate:.3f} < 1")
    assert ok


# -- 5 -----------------------------------------------------------------------


def _sandwich_violations(seed, drifts):
    p = sample_bm(seed, 14)
    total = 0
    for f, c0 in drifts:
        x = apply_drift(p, f)
        total += sum(holder_sandwich(p, f, m, 0.6, c0, drifted=x).violations for m in range(8, 15))
    return total


def test_criterion_05_holder_sandwich(record):
    drifts = [(f, holder_coefficient(f, 0.5, 14)) for f in (Cantor(0.25), Linear(0.5))]
    bad = sum(_sandwich_violations(s, drifts) for s in path_seeds(505, 100))
    record(5, bad == 0, f"{bad} inclusion violations over 100 paths x 2 drifts x levels 8-14")
    assert bad == 0


# -- 6 -----------------------------------------------------------------------


def test_criterion_06_cantor_witness(record):
    gamma, g1 = 1 / 9, 0.15
    beta = math.log(g1) / (2 * math.log(gamma))
    c = math.sqrt(g1)
    f = Cantor(gamma)
    grid = 32
    step = 2.0**-grid
    ends = np.floor(cantor_components(gamma, 6).left / step) * step
    missing = 0
    for t in ends:
        for ell in range(0, 9):
            if reverse_holder_witness(f, beta, c, float(t), gamma**ell, grid) is None:
                missing += 1
    # same-component pairs at exact scales: |f(t + gamma**k) - f(t)| = 2**-k >= c gamma**(k beta)
    exact = all(
        abs(f.scalar(t + gamma**k) - f.scalar(t)) >= c * gamma ** (k * beta) * (1 - 1e-12)
        for t in cantor_components(gamma, 6).left
        for k in range(6, 9)
    )
    dim = dim_fast_cantor_drift(0.95, gamma).value
    ok = missing == 0 and exact and abs(dim - 0.31547) < 1e-5
    record(6, ok, f"{missing} missing witnesses over 64 t x 9 scales; dim_fast_cantor_drift(0.95, 1/9) = {dim:.6f}")
    assert ok


# -- 7 -----------------------------------------------------------------------


def _random_drift(rng):
    kind = rng.integers(4)
    if kind == 0:
        return Zero()
    if kind == 1:
        return Linear(float(rng.uniform(-3, 3)))
    if kind == 2:
        return Cantor(float(rng.uniform(0.05, 0.45)))
    alpha = float(rng.uniform(0.05, 0.6))
    A = int(math.floor(1 / (2 * (1 - alpha)))) + 1 + int(rng.integers(2))
    return Loud(alpha, A, 4)


def test_criterion_07_measure_lab_inequalities(record):
    x = np.round(np.arange(0.1, 6.0 + 1e-9, 0.05), 10)
    mid = math.sqrt(2 * math.pi) * gaussian_tail_q(x)
    mills_bad = int(np.sum(mills_lower(x) > mid) + np.sum(mid > mills_upper(x)))

    lemma_bad = 0
    for gamma, n in ((0.25, 8), (1 / 9, 6)):
        mu = cantor_natural_measure(gamma, n)
        L = math.ceil(-math.log2(gamma**n)) + 2
        for eta in (0.55, 0.6):
            A = a_eta(mu, eta, range(1, L + 1), 12)
            for ell in range(4, 11):
                h = 2.0**-ell
                rhs = lemma_bound(A, eta, h)
                lemma_bad += int(s_h(mu, h) > rhs) + int(s_tilde_h(mu, h) > rhs)

    rng = np.random.default_rng(707)
    fuzz_bad = 0
    for _ in range(1000):
        f = _random_drift(rng)
        t = np.unique(rng.random(int(rng.integers(1, 300))))
        w = rng.random(t.size) + 1e-3
        mu = DiscreteMeasure(t, w / w.sum())
        h = float(10 ** rng.uniform(-4, math.log10(0.5)))
        minus, plus = sign_set_masses(f, h, mu)
        chosen = minus if select_sign_set(f, h, mu) is Sign.MINUS else plus
        fuzz_bad += int(chosen < 0.5 - 1e-12)

    ok = mills_bad == lemma_bad == fuzz_bad == 0
    record(7, ok, f"violations: Mills {mills_bad}/119, Lemma bound {lemma_bad}/56, sign-set fuzz {fuzz_bad}/1000")
    assert ok


# -- 8 -----------------------------------------------------------------------


def test_criterion_08_j_functional(record):
    mu = uniform_measure(1024)
    h = 2.0**-8
    a0 = j_mu_estimate(808, 2000, 12, mu, h, 0.0)
    exact = j_mu_exact_mean_a0(mu, 12, h)
    z = abs(a0.ej - exact) / a0.stderr_ej

    pz = paley_zygmund_check(j_mu_estimate(809, 2000, 12, mu, h, 0.3))

    shape = [j_mu_estimate(810, 2000, 12, mu, g, 0.3).ej / (g * phi(g, 0.3)) for g in (2.0**-6, 2.0**-7, 2.0**-8)]
    spread = max(shape) / min(shape)

    ok = z < 3 and pz.passed and spread <= 2
    record(
        8,
        ok,
        f"a=0 |z| = {z:.2f}; PZ margin {pz.margin:.4f} (se {pz.stderr:.4f}); E(J)/(h Phi) spread {spread:.3f}",
    )
    assert ok


# -- 9 -----------------------------------------------------------------------


def test_criterion_09_limsup_counter(record):
    reports = [variance_report(909, 500, m, n, 0.5, 0.05) for m, n in ((6, 12), (8, 14))]
    counts_ok = all(r.mean_ok() and r.variance_ok() for r in reports)
    v70 = dimension_condition(0.70, 0.5, 0.01).verdict
    v90 = dimension_condition(0.90, 0.5, 0.01).verdict
    ok = counts_ok and v70 is Verdict.DECREASING and v90 is Verdict.DIVERGING
    detail = "; ".join(
        f"(m,n)=({r.m},{r.n}) mean z {abs(r.mean_hat - r.mean_analytic) / r.mean_stderr:.2f}, var/bound {r.ratio:.3f}"
        for r in reports
    )
    record(9, ok, f"{detail}; gamma=0.70 {v70.value}, gamma=0.90 {v90.value}")
    assert ok


# -- 10 ----------------------------------------------------------------------


def _fbm_increment_moments(seed, hurst, lags):
    v = sample_fbm(seed, hurst, 12).values
    return [float(np.mean((v[d:] - v[:-d]) ** 2)) for d in lags]


def _fbm_fast_counts(seed, levels):
    p = sample_fbm(seed, 0.5, 12)
    return [count(l_flags(p, m, 0.5)) for m in levels]


def test_criterion_10_fbm(record):
    lags = [2**k for k in range(7)]
    slopes = {}
    for hurst in (0.5, 0.7):
        m2 = np.mean([_fbm_increment_moments(s, hurst, lags) for s in path_seeds(1010, 200)], axis=0)
        slopes[hurst] = np.polyfit(np.log(np.array(lags) * 2.0**-12), np.log(m2), 1)[0]
    levels = [10, 11, 12]
    counts = np.mean([_fbm_fast_counts(s, levels) for s in path_seeds(1011, 200)], axis=0)
    fast = fit_exponent(levels, counts, "SQRT_LOG").slope
    analytic = fit_exponent(levels, [expected_l_count(m, 0.5) for m in levels], "SQRT_LOG").slope
    ok = abs(slopes[0.5] - 1.0) <= 0.05 and abs(slopes[0.7] - 1.4) <= 0.05 and _in(fast, 0.63, 0.87)
    record(
        10,
        ok,
        f"increment slopes H=0.5 {slopes[0.5]:.4f}, H=0.7 {slopes[0.7]:.4f}; "
        f"H=0.5 fast-count slope {fast:.4f} in [0.63, 0.87] (analytic {analytic:.4f})",
    )
    assert ok


# -- 11 ----------------------------------------------------------------------

_CLI_ARGS = {
    "orey-taylor": ["--levels", "6:9"],
    "zero-intersection": ["--levels", "6:9"],
    "cantor-drift": ["--levels", "6:9", "--drift", "cantor:gamma=1/9"],
    "loud-drift": ["--levels", "6:9", "--drift", "loud:alpha=0.4,A=2,terms=5"],
    "fbm": ["--levels", "6:9", "--hurst", "0.7"],
    "holder-sandwich": ["--levels", "6:9"],
    "covering": ["--levels", "5:8"],
    "jlab": ["--levels", "6:7", "--paths", "100"],
    "limsup-variance": ["--levels", "6:10", "--paths", "200"],
    "dims": [],
}


def test_criterion_11_determinism(record, tmp_path):
    differ = []
    for preset in PRESETS:
        outs = []
        for workers in (1, 2):
            out = tmp_path / f"{preset}-{workers}.csv"
            args = ["run", "--preset", preset, "--seed", "1111", "--paths", "16", "--workers", str(workers)]
            assert cli.main(args + _CLI_ARGS[preset] + ["--out", str(out)]) == 0
            outs.append(out.read_bytes())
        if outs[0] != outs[1]:
            differ.append(preset)
    record(11, not differ, f"{len(PRESETS) - len(differ)}/{len(PRESETS)} presets byte-identical for workers 1 vs 2")
    assert not differ
