import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fastpoints.drift import (
    Cantor,
    IntervalList,
    Linear,
    Loud,
    Sign,
    Tabulated,
    Zero,
    cantor_components,
    cantor_value,
    default_gamma1,
    holder_coefficient,
    loud_value,
    parse_drift,
    reverse_holder_witness,
    sign_set_indicator,
    triangle_wave,
)
from fastpoints.errors import ConfigurationError, DomainError, UsageError

gammas = st.floats(0.05, 0.45)


# -- Cantor function ---------------------------------------------------------


@given(gammas, st.integers(0, 25))
def test_cantor_boundary_values(gamma, depth):
    assert cantor_value(gamma, depth, 0.0) == 0.0
    assert cantor_value(gamma, depth, 1.0) == 1.0
    assert cantor_value(gamma, depth, 0.5) == 0.5


def test_cantor_quarter():
    for depth in (1, 5, 30):
        assert cantor_value(0.25, depth, 0.25) == 0.5


def test_cantor_extends_constantly():
    assert cantor_value(0.2, 10, 1.7) == 1.0
    np.testing.assert_array_equal(Cantor(0.2)(np.array([1.0, 1.5, 2.0])), 1.0)


@pytest.mark.parametrize("gamma", [0.0, 0.5, 0.7, -0.1])
def test_cantor_gamma_range(gamma):
    with pytest.raises(ConfigurationError):
        cantor_value(gamma, 3, 0.5)
    with pytest.raises(ConfigurationError):
        Cantor(gamma)


@pytest.mark.parametrize("gamma", [1 / 9, 0.25, 0.4])
def test_cantor_monotone_on_grid(gamma):
    v = cantor_value(gamma, 20, np.linspace(0, 1, 2**14 + 1))
    assert np.all(np.diff(v) >= 0)


@pytest.mark.parametrize("gamma", [1 / 9, 0.25, 0.4])
def test_cantor_symmetry(gamma):
    t = np.linspace(0, 1, 2**12 + 1)
    np.testing.assert_allclose(cantor_value(gamma, 20, 1 - t), 1 - cantor_value(gamma, 20, t), atol=1e-12)


@pytest.mark.parametrize("gamma", [1 / 9, 0.25, 0.4])
def test_cantor_self_similar(gamma):
    t = np.linspace(0, 1, 2**10 + 1)
    d = 18
    np.testing.assert_allclose(cantor_value(gamma, d + 1, gamma * t), cantor_value(gamma, d, t) / 2, atol=1e-12)


def test_cantor_truncation_error():
    t = np.linspace(0, 1, 4097)
    exact = cantor_value(0.3, 40, t)
    for d in (2, 5, 10):
        assert np.max(np.abs(cantor_value(0.3, d, t) - exact)) <= 2.0**-d


def test_cantor_constant_on_gaps():
    gamma = 0.2
    comps = cantor_components(gamma, 6)
    for lo, hi in comps.gaps():
        v = cantor_value(gamma, 30, np.linspace(lo, hi, 9)[1:-1])
        assert np.ptp(v) < 1e-12


def test_cantor_scalar_in_scalar_out():
    assert isinstance(cantor_value(0.25, 5, 0.3), float)


# -- Cantor components -------------------------------------------------------


def test_components_small():
    assert list(cantor_components(0.3, 0)) == [(0.0, 1.0)]
    assert list(cantor_components(0.3, 1)) == pytest.approx([(0.0, 0.3), (0.7, 1.0)])


@given(gammas, st.integers(0, 12))
@settings(max_examples=40)
def test_components_total_length(gamma, n):
    c = cantor_components(gamma, n)
    assert len(c) == 2**n
    assert c.total_length == pytest.approx((2 * gamma) ** n, rel=1e-9)


def test_components_underflow():
    with pytest.raises(DomainError):
        cantor_components(0.01, 400)


def test_interval_list_validation_and_locate():
    with pytest.raises(ConfigurationError):
        IntervalList([0.0, 0.2], [0.3, 0.4])
    with pytest.raises(ConfigurationError):
        IntervalList([0.5], [0.4])
    iv = IntervalList([0.0, 0.5], [0.25, 1.0])
    np.testing.assert_array_equal(iv.locate([0.1, 0.3, 0.75, 1.0]), [0, -1, 1, 1])
    assert iv.gaps() == [(0.25, 0.5)]


# -- Loud function -----------------------------------------------------------


def test_triangle_wave():
    np.testing.assert_allclose(triangle_wave(np.array([0.0, 0.5, 1.0, 1.5, 2.0, 3.0])), [0, 0.5, 1, 0.5, 0, 1])


def test_loud_at_zero():
    assert loud_value(0.4, 2, 6, 0.0) == 0.0


def test_loud_condition():
    with pytest.raises(ConfigurationError):
        Loud(0.6, 1)  # 2 * 1 * 0.4 = 0.8
    Loud(0.4, 1)  # 1.2 > 1


@given(st.floats(0, 1), st.integers(1, 8))
def test_loud_bounded_by_geometric_sum(t, terms):
    alpha, A = 0.4, 2
    bound = sum(2.0 ** (-2 * A * alpha * k) for k in range(1, terms + 1))
    assert 0.0 <= loud_value(alpha, A, terms, t) <= bound + 1e-15


def test_loud_partial_sums_converge():
    t = np.linspace(0, 1, 5001)
    alpha, A = 0.4, 2
    for K in range(1, 6):
        gap = np.max(np.abs(loud_value(alpha, A, K + 1, t) - loud_value(alpha, A, K, t)))
        assert gap <= 2.0 ** (-2 * A * alpha * (K + 1)) + 1e-15


# -- Hölder probes -----------------------------------------------------------


def test_holder_zero_and_linear():
    assert holder_coefficient(Zero(), 0.5, 8) == 0.0
    assert holder_coefficient(Linear(1.0), 0.5, 8) == pytest.approx(1.0)


def test_holder_cantor_quarter_stable():
    c = [holder_coefficient(Cantor(0.25), 0.5, lvl) for lvl in (8, 10, 12)]
    assert max(c) / min(c) <= 1.05
    assert math.isfinite(c[-1])


def test_holder_theta_range():
    with pytest.raises(ConfigurationError):
        holder_coefficient(Zero(), 0.0, 4)


def test_witness_zero_drift():
    assert reverse_holder_witness(Zero(), 0.5, 0.1, 0.3, 0.5, 12) is None


def test_witness_linear():
    # |h| >= c h**beta first holds at h = c**(1/(1-beta))
    h = reverse_holder_witness(Linear(1.0), 0.5, 0.25, 0.0, 0.5, 10)
    assert h == pytest.approx(0.0625)


def test_witness_trims_domain():
    assert reverse_holder_witness(Zero(), 0.5, 1.0, 0.99, 0.5, 10) is None


def test_witness_cantor_every_scale():
    gamma, g1 = 1 / 9, 0.15
    beta = math.log(g1) / (2 * math.log(gamma))
    f = Cantor(gamma)
    c = math.sqrt(g1)
    for ell in range(0, 9):
        h = reverse_holder_witness(f, beta, c, 0.0, gamma**ell, 32)
        assert h is not None and h <= gamma**ell


def test_default_gamma1():
    assert default_gamma1(1 / 9) == pytest.approx((1 / 9 + 0.25) / 2)
    with pytest.raises(ConfigurationError):
        default_gamma1(0.3)


# -- sign sets ---------------------------------------------------------------


def test_sign_sets():
    assert sign_set_indicator(Zero(), 0.1, 0.3) is Sign.BOTH
    assert sign_set_indicator(Linear(1.0), 0.1, 0.3) is Sign.PLUS
    assert sign_set_indicator(Linear(-1.0), 0.1, 0.3) is Sign.MINUS
    # inside the first removed gap of the 1/4-Cantor set
    assert sign_set_indicator(Cantor(0.25), 0.1, 0.3) is Sign.BOTH
    with pytest.raises(DomainError):
        sign_set_indicator(Zero(), 0.0, 0.3)


# -- parsing and tables ------------------------------------------------------


def test_parse_drift():
    assert parse_drift("zero") == Zero()
    assert parse_drift("linear:c=0.5") == Linear(0.5)
    assert parse_drift("cantor:gamma=1/9,depth=20") == Cantor(1 / 9, 20)
    assert parse_drift("loud:alpha=0.4,A=2,terms=5") == Loud(0.4, 2, 5)
    for bad in ("spline", "cantor", "cantor:gamma", "linear:c=abc"):
        with pytest.raises(UsageError):
            parse_drift(bad)
    with pytest.raises(ConfigurationError):
        parse_drift("loud:alpha=0.9,A=1")


def test_descriptor_round_trip():
    for f in (Zero(), Linear(-2.0), Cantor(0.2, 12), Loud(0.3, 3, 4)):
        assert parse_drift(f.descriptor) == f


def test_tabulated_round_trip(tmp_path):
    t = np.arange(9) / 8
    tab = Tabulated(t, t**2)
    path = tmp_path / "drift.txt"
    tab.save(path)
    back = parse_drift(f"table:path={path}")
    np.testing.assert_array_equal(back.values, tab.values)
    assert back.scalar(0.5) == 0.25
    with pytest.raises(ConfigurationError):
        Tabulated([0.0, 0.5, 0.5], [0, 1, 2])
