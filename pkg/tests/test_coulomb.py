import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate
from scipy.special import erf

from coupled_hartree.coulomb import (
    CELL_AVERAGE_INV_R,
    SPLITTING_VARIANTS,
    check_hls_bound,
    check_splitting_inequality,
    coulomb_energy,
    hls_constant,
    hls_intermediate_margin,
    potential,
    solve_coulomb_3d,
    solve_coulomb_radial,
)
from coupled_hartree.errors import ConfigError, NonPositivePotential
from coupled_hartree.grid import GridSpec, PairState, RadialGrid, embed_radial


def test_cell_average_of_inverse_distance():
    octant, _ = integrate.tplquad(
        lambda z, y, x: 1.0 / np.sqrt(x * x + y * y + z * z + 1e-300), 0, 0.5, 0, 0.5, 0, 0.5
    )
    assert CELL_AVERAGE_INV_R == pytest.approx(8.0 * octant, rel=1e-7)


def _radial_gaussian_error(m):
    r = RadialGrid(m, 40.0)
    phi = solve_coulomb_radial(np.exp(-r.r**2), r)
    exact = np.pi**1.5 * erf(r.r) / r.r
    return np.max(np.abs(phi - exact)), r.dr


def test_radial_potential_of_gaussian_is_second_order():
    e1, dr = _radial_gaussian_error(2000)
    e2, _ = _radial_gaussian_error(4000)
    assert e1 < dr**2 * 2 * np.pi
    assert 3.0 < e1 / e2 < 5.0


def test_box_potential_matches_radial():
    g, r = GridSpec(48, 8.0), RadialGrid(4000, 40.0)
    q = np.exp(-r.r**2)
    phi_r = solve_coulomb_radial(q, r)
    phi_b = potential(embed_radial(q, r, (0, 0, 0), g), g)
    ref = embed_radial(phi_r, r, (0, 0, 0), g)
    mask = (g.radius > 1.0) & (g.radius < 4.0)
    assert np.max(np.abs(phi_b[mask] / ref[mask] - 1.0)) < 0.01


@given(st.floats(0.3, 3.0), st.floats(0.1, 5.0))
def test_potential_is_linear_in_charge(a, c):
    r = RadialGrid(400, 20.0)
    q = np.exp(-a * r.r**2)
    assert np.allclose(potential(c * q, r), c * potential(q, r), rtol=1e-12, atol=0)


@given(st.integers(0, 2**32 - 1))
def test_coulomb_energy_is_positive_definite(seed):
    rng = np.random.default_rng(seed)
    g = GridSpec(12, 3.0)
    q = rng.standard_normal(g.shape) * np.exp(-g.radius**2)
    assert coulomb_energy(q, g) > 0


def test_potential_kernel_symmetric(rng):
    g = GridSpec(12, 3.0)
    q1, q2 = rng.random(g.shape), rng.random(g.shape)
    assert g.inner(q1, potential(q2, g)) == pytest.approx(g.inner(q2, potential(q1, g)), rel=1e-10)


def test_weight_enters_energy_quadratically(box):
    s = PairState(np.exp(-box.radius**2), np.exp(-2 * box.radius**2), box)
    e1 = solve_coulomb_3d(s, 1.0).energy
    e2 = solve_coulomb_3d(s, 2.0).energy
    assert e2 == pytest.approx(4.0 * e1, rel=1e-12)


def test_nonpositive_weight_rejected(box):
    s = PairState(np.exp(-box.radius**2), box.zeros(), box)
    with pytest.raises(NonPositivePotential):
        solve_coulomb_3d(s, 0.0)


def test_radial_oracle_rejects_negative_charge(ray):
    with pytest.raises(ConfigError):
        solve_coulomb_radial(-np.ones(ray.shape), ray)


@pytest.mark.parametrize("variant", sorted(SPLITTING_VARIANTS))
def test_variants_satisfy_cauchy_schwarz_condition(variant):
    c, a, b = SPLITTING_VARIANTS[variant]
    assert c**2 <= 16 * np.pi * a * b


@given(
    st.integers(0, 2**32 - 1),
    st.sampled_from(sorted(SPLITTING_VARIANTS)),
    st.sampled_from(["u", "v"]),
    st.floats(0.1, 10.0),
)
def test_splitting_inequality_on_random_pairs(seed, variant, component, weight):
    rng = np.random.default_rng(seed)
    g = GridSpec(16, 5.0)
    amp = rng.uniform(0.01, 20.0, 2)
    wid = rng.uniform(0.3, 2.0, 2)
    s = PairState(amp[0] * np.exp(-(g.radius / wid[0]) ** 2), amp[1] * np.exp(-(g.radius / wid[1]) ** 2), g)
    lhs, rhs = check_splitting_inequality(s, weight, variant, component)
    assert lhs <= rhs


@given(st.integers(0, 2**32 - 1))
def test_quartic_bounds_on_random_pairs(seed):
    rng = np.random.default_rng(seed)
    g = GridSpec(16, 5.0)
    rho = 0.5 + 0.5 * rng.random(g.shape)
    s = PairState(
        rng.uniform(0.1, 5) * np.exp(-g.radius**2 / rng.uniform(0.3, 3)),
        rng.uniform(0.1, 5) * np.exp(-g.radius**2 / rng.uniform(0.3, 3)),
        g,
    )
    assert check_hls_bound(s, rho, 1.0, 1.0) >= 0
    assert hls_intermediate_margin(s, rho, 1.0) >= 0


def test_hls_constant_value():
    assert hls_constant(1.0, 1.0) == pytest.approx(16 * 2 ** (1 / 3) / (3 * np.sqrt(3) * np.pi))
    assert hls_constant(2.0, 4.0) == pytest.approx(hls_constant(1.0, 1.0) * 4 / 8)


def test_hls_requires_valid_bound(box):
    s = PairState(np.exp(-box.radius**2), box.zeros(), box)
    with pytest.raises(ConfigError):
        check_hls_bound(s, 2.0, 1.0, 1.0)


def test_box_coulomb_energy_is_second_order():
    errs = []
    for n in (32, 64):
        g = GridSpec(n, 6.0)
        errs.append(abs(coulomb_energy(np.exp(-2 * g.radius**2), g) / (np.pi**2.5 / 4) - 1))
    assert errs[0] < 0.01
    assert 3.0 < errs[0] / errs[1] < 5.0
