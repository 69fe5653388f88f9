import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy import optimize

from coupled_hartree import bounds
from coupled_hartree.errors import ConfigError, NotApplicable
from coupled_hartree.functional import ProblemParams
from coupled_hartree.grid import GridSpec

p_sub = st.floats(2.05, 2.95)
pos = st.floats(0.1, 10.0)


def log_scan_min(fn, lo=-30.0, hi=30.0, points=60001):
    """Independent minimum of ``fn`` over ``s = e^x``, polished by Nelder-Mead."""
    xs = np.linspace(lo, hi, points)
    vals = np.array([fn(np.exp(x)) for x in xs])
    i = int(np.argmin(vals))
    res = optimize.minimize(lambda x: fn(np.exp(x[0])), [xs[i]], method="Nelder-Mead",
                            options={"xatol": 1e-12, "fatol": 1e-15})
    return min(vals[i], res.fun)


def test_constants_table_agrees_with_oracles():
    rows = bounds.constants_table()
    assert all(r.agree for r in rows)
    values = {r.name: r.value for r in rows}
    assert values["d_lions"] == pytest.approx(2.37841, abs=1e-5)
    assert values["nonexistence_bound"] == pytest.approx(1.37841, abs=1e-5)
    assert values["s_c"] == pytest.approx(1.28, abs=1e-12)
    assert values["d_c"] == pytest.approx(1.81019, abs=1e-5)
    assert values["g_max"] == pytest.approx(1.68179, abs=1e-5)


def test_constants_csv_has_header_and_rows():
    text = bounds.constants_csv(bounds.constants_table())
    lines = text.strip().splitlines()
    assert lines[0] == "name,inputs,value,oracle_value,agree"
    assert len(lines) == 1 + len(bounds.constants_table())


@given(pos, pos, p_sub)
def test_lions_constant_matches_scan(theta, k, p):
    value = bounds.pointwise_min_constant(theta, k, p, "lions").value
    oracle = log_scan_min(lambda s: (theta * s * s + np.sqrt(2) * k * s**3) / s**p)
    assert value == pytest.approx(oracle, rel=1e-8)


@given(pos, pos, p_sub)
def test_coercive_upper_is_the_tangency_coupling(V, rho, p):
    beta = bounds.coercive_upper(V, rho, p)
    assume(beta > -0.9)
    # at the window end the profile V s^2/4 + rho s^3/sqrt8 - (1+beta) s^p/p touches zero
    m = log_scan_min(lambda s: (0.25 * V * s * s + rho * s**3 / np.sqrt(8)) / s**p)
    assert (1 + beta) / p == pytest.approx(m, rel=1e-8)


@given(pos, pos, st.floats(0.0, 5.0), p_sub)
def test_m_beta_matches_scan(V, rho, beta, p):
    oracle = log_scan_min(lambda s: 0.25 * V * s * s + rho * s**3 / np.sqrt(8) - (1 + beta) / p * s**p)
    assert bounds.m_beta(V, rho, beta, p) == pytest.approx(min(0.0, oracle), rel=1e-7, abs=1e-12)


@given(pos, pos, st.floats(0.0, 5.0), p_sub)
def test_positivity_threshold_is_m_beta_vanishing(V, rho, beta, p):
    lhs = V ** (3 - p) * rho ** (p - 2)
    rhs = bounds.l25_rhs(beta, p)
    assume(abs(lhs / rhs - 1) > 1e-6)
    assert bounds.l25_threshold_check(V, rho, beta, p) == (bounds.m_beta(V, rho, beta, p) == 0.0)


@given(st.floats(0.01, 5.0), st.floats(2.05, 3.95))
def test_argmax_g_matches_dense_scan(beta, p):
    s = bounds.argmax_g(beta, p)
    xs = np.linspace(0, 1, 400001)
    assert bounds.g_beta(s, beta, p) >= np.max(bounds.g_beta(xs, beta, p)) - 1e-12
    assert 0 <= s <= 0.5


@given(st.floats(0.01, 5.0), st.floats(2.05, 3.95), st.floats(0, 1))
def test_g_beta_symmetric(beta, p, s):
    assert bounds.g_beta(s, beta, p) == pytest.approx(bounds.g_beta(1 - s, beta, p), rel=1e-12)


@given(st.floats(0.2, 5.0), st.floats(0.0, 5.0), st.floats(2.05, 2.95))
def test_f_cd_tangency_and_interval(c, beta, p):
    d_c, s_c = bounds.f_cd_constants(c, beta, p)
    assert bounds.f_cd(s_c, c, d_c, beta, p) == pytest.approx(0.0, abs=1e-9 * (d_c + 1))
    assert bounds.f_cd_interval(c, d_c * 1.01, beta, p) is None
    lo, hi = bounds.f_cd_interval(c, 0.5 * d_c, beta, p)
    assert lo < s_c < hi
    for s in (lo, hi):
        assert abs(bounds.f_cd(s, c, 0.5 * d_c, beta, p)) < 1e-9 * (d_c + c * s + 1)
    assert bounds.f_cd(s_c, c, 0.5 * d_c, beta, p) < 0


@given(pos, pos, st.floats(2.05, 3.95))
def test_filtration_level_is_energy_at_norm_threshold(lam, rho, p):
    assert bounds.filtration_level(lam, rho, p) == pytest.approx(
        (p - 2) / (4 * p) * bounds.xbar(lam, rho, p), rel=1e-12
    )


def test_xbar_value():
    assert bounds.xbar(1.0, 1.0, 3.5) == pytest.approx(2.42935, abs=1e-5)


@given(st.floats(0.5, 5.0), st.floats(2.05, 3.95))
def test_single_component_level_is_scalar_nehari_energy(S, p):
    # a scalar Nehari point with ||w||^2 = int |w|^p = S^{2p/(p-2)} has energy (1/2 - 1/p) of that
    norm2 = S ** (2 * p / (p - 2))
    assert bounds.single_component_level(S, p) == pytest.approx((0.5 - 1 / p) * norm2)


@given(st.floats(0.5, 3.0), st.floats(1.0, 3.0), st.floats(0.5, 3.0), st.floats(0.05, 5.0), st.floats(2.2, 3.9))
def test_alpha_infinity_decreases_with_coupling(lam, Vmax, S, beta, p):
    assume(Vmax >= lam)
    a1 = bounds.alpha_infinity(lam, Vmax, S, beta, p)
    a2 = bounds.alpha_infinity(lam, Vmax, S, 2 * beta, p)
    assert a2 < a1


def test_beta_hat_is_smallest_satisfying_coupling():
    args = (1.0, 1.0, 1.0, 2.0, 2.5, 3.0)
    b = bounds.beta_hat(*args)
    lhs, rhs = bounds.beta_hat_lhs_rhs(b, *args)
    assert lhs < rhs
    if b > 0.5:
        lhs2, rhs2 = bounds.beta_hat_lhs_rhs(b * (1 - 1e-9), *args)
        assert lhs2 >= rhs2 * (1 - 1e-6)


def test_beta_hat_not_applicable_above_classification_exponent():
    with pytest.raises(NotApplicable):
        bounds.beta_hat(1.0, 1.0, 1.0, 2.0, 2.5, 3.5)


def test_sublevel_measure_for_constant_potentials():
    g = GridSpec(8, 2.0)
    volume = (2 * g.L) ** 3
    low = ProblemParams.constant(g, 2.5, 1.0, 0.01, 0.01)
    high = ProblemParams.constant(g, 2.5, 1.0, 100.0, 100.0)
    assert bounds.sublevel_measure(low) == pytest.approx(volume)
    assert bounds.sublevel_measure(high) == 0.0


@pytest.mark.parametrize(
    "call",
    [
        lambda: bounds.coercive_upper(1, 1, 3.5),
        lambda: bounds.f_cd_constants(1, 1, 3.5),
        lambda: bounds.pointwise_min_constant(1, 1, 3.2),
    ],
)
def test_subcubic_only(call):
    with pytest.raises(NotApplicable):
        call()


def test_invalid_inputs():
    with pytest.raises(ConfigError):
        bounds.argmax_g(0.0, 3.0)
    with pytest.raises(ConfigError):
        bounds.m_beta(-1, 1, 1, 2.5)
    with pytest.raises(ConfigError):
        bounds.pointwise_min_constant(1, 1, 2.5, "other")
    assert bounds.nonexistence_threshold(0.0, 1.0, 2.5) == -1.0
