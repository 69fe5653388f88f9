import numpy as np
import pytest
from hypothesis import given, strategies as st

from coupled_hartree.constructions import (
    MultibumpSpec,
    WellProfile,
    build_multibump,
    center_of_mass,
    constant_profile,
    coupled_ansatz,
    cutoff,
    multibump_ledger,
    problem_from_profiles,
    scale_potentials,
    shift_cells,
    smoothstep_cutoff,
)
from coupled_hartree.errors import BoxTooSmall, ConfigError, ZeroState
from coupled_hartree.functional import ProblemParams, energy
from coupled_hartree.grid import GridSpec, PairState, RadialGrid
from coupled_hartree.reference import gaussian_pair

profiles = st.builds(
    WellProfile,
    st.floats(1.0, 5.0),
    st.floats(0.0, 0.9),
    st.floats(0.5, 3.0),
    st.lists(st.floats(0.0, 4.0), min_size=1, max_size=2).map(tuple),
    st.sampled_from([2, 4, 8]),
)


@given(profiles, st.floats(0.05, 10.0))
def test_x_grad_matches_finite_difference(f, r):
    h = 1e-5
    fd = r * (f(r + h) - f(r - h)) / (2 * h)
    assert f.x_grad(r) == pytest.approx(fd, rel=1e-5, abs=1e-7)


@given(profiles)
def test_inf_sup_bracket_samples(f):
    r = np.linspace(0, 30, 30001)
    vals = f(r)
    assert f.inf <= vals.min() + 1e-12
    assert f.sup >= vals.max() - 1e-12
    assert f.inf <= f.f_inf <= f.sup + 1e-12


@given(profiles)
def test_d0_is_virial_infimum(f):
    r = np.linspace(0, 40, 100001)
    assert f.d0() <= np.min(2 * f(r) + f.x_grad(r)) + 1e-6
    assert f.d0() <= 2 * f.f_inf


@given(profiles, st.floats(0.1, 3.0), st.floats(0.0, 10.0))
def test_scaled_profile(f, eps, r):
    assert f.scaled(eps)(r) == pytest.approx(float(f(eps * r)), rel=1e-12)


def test_profile_validation():
    with pytest.raises(ConfigError):
        WellProfile(1.0, 0.5, 0.0)
    with pytest.raises(ConfigError):
        WellProfile(1.0, 0.5, 1.0, (0.0,), 3)
    with pytest.raises(ConfigError):
        WellProfile(1.0).scaled(0.0)


def test_annular_well_minimum_sits_on_ring():
    f = WellProfile(3.0, 2.0, 0.5, (2.5,), 8)
    assert f.argmin_radius() == pytest.approx(2.5, abs=0.05)
    assert f.inf == pytest.approx(1.0, abs=1e-9)


def test_problem_from_profiles_fields():
    ray = RadialGrid(500, 20.0)
    V, rho = WellProfile(3.0, 1.0, 2.0, (0.0,), 8), constant_profile(0.5)
    P = problem_from_profiles(ray, 2.5, 1.0, V, rho)
    assert P.lam == pytest.approx(2.0) and P.V_inf == 3.0 and P.V_max == pytest.approx(3.0)
    assert P.rho_min == P.rho_max == P.rho_inf == 0.5
    assert np.allclose(P.x_grad_rho, 0.0)
    Q = scale_potentials(P, 0.5)
    assert np.allclose(Q.V, V(0.5 * ray.r))
    with pytest.raises(ConfigError):
        scale_potentials(ProblemParams.constant(ray, 2.5, 1.0), 0.5)


@given(st.floats(0.0, 1.0))
def test_coupled_ansatz_preserves_density(s):
    g = GridSpec(8, 2.0)
    z = np.exp(-g.radius**2)
    x = coupled_ansatz(z, s, g)
    assert np.allclose(x.u**2 + x.v**2, z**2, rtol=1e-12)


def test_coupled_ansatz_rejects_bad_input():
    g = GridSpec(8, 2.0)
    with pytest.raises(ZeroState):
        coupled_ansatz(g.zeros(), 0.5, g)
    with pytest.raises(ConfigError):
        coupled_ansatz(np.ones(g.shape), 1.5, g)


@given(st.floats(0.5, 20.0))
def test_smoothstep_shape_and_slope(R):
    r = np.linspace(0, 2 * R, 200001)
    psi = smoothstep_cutoff(r, R)
    assert np.all(psi[r <= R / 2] == 1.0) and np.all(psi[r >= R] == 0.0)
    assert np.all(np.diff(psi) <= 4 * np.finfo(float).eps)
    slope = np.max(np.abs(np.diff(psi) / np.diff(r)))
    assert slope <= 3.75 / R * (1 + 1e-6)
    assert slope >= 3.75 / R * (1 - 1e-3)


def test_cutoff_on_both_grids():
    g = GridSpec(16, 4.0)
    s = cutoff(PairState(np.ones(g.shape), np.ones(g.shape), g), 2.0)
    assert np.all(s.u[g.radius >= 2.0] == 0) and np.all(s.u[g.radius <= 1.0] == 1)
    ray = RadialGrid(100, 5.0)
    t = cutoff(PairState(np.ones(ray.shape), np.ones(ray.shape), ray), 2.0)
    assert np.all(t.v[ray.r >= 2.0] == 0)


def test_shift_cells_refuses_wraparound():
    g = GridSpec(8, 2.0)
    f = g.zeros()
    f[3:5, 3:5, 3:5] = 1.0
    assert shift_cells(f, (2, 0, -1))[5, 3, 2] == 1.0
    with pytest.raises(BoxTooSmall):
        shift_cells(f, (4, 0, 0))


def test_multibump_spec_validation_and_centres():
    spec = MultibumpSpec(3, 1.0, spacing=4.0)
    assert np.allclose(spec.centers()[:, 0], [-4, 0, 4])
    assert MultibumpSpec(2, 1.0).gap == 8.0
    with pytest.raises(ConfigError):
        MultibumpSpec(2, 3.0, spacing=4.0)
    with pytest.raises(ConfigError):
        MultibumpSpec(2, 1.0, e=(1.0, 1.0, 0.0))
    with pytest.raises(ConfigError):
        MultibumpSpec(2, 1.0, eps_N=0.5)


def test_multibump_ledger_splits_energy():
    g = GridSpec(48, 12.0)
    P = ProblemParams.constant(g, 2.5, 1.0)
    bump = cutoff(gaussian_pair(g, 1.0, 1.0, 1.0, 1.0), 3.0)
    spec = MultibumpSpec(2, 3.0, spacing=8.0)
    multi, ledger = multibump_ledger(bump, spec, P)
    # the spectral gradient is nonlocal, so disjoint bumps keep a tiny kinetic overlap
    assert ledger.additive_residual < 1e-6
    assert ledger.cross_coulomb == pytest.approx(ledger.point_charge, rel=1e-3)
    assert energy(multi, P).total == pytest.approx(ledger.total.total)
    with pytest.raises(BoxTooSmall):
        build_multibump(bump, MultibumpSpec(3, 3.0, spacing=10.0))


def test_center_of_mass():
    g = GridSpec(16, 4.0)
    s = gaussian_pair(g, 1.0, 0.7, 1.0, 0.7, center=(1.0, -0.5, 0.0))
    assert np.allclose(center_of_mass(s), [1.0, -0.5, 0.0], atol=1e-6)
    with pytest.raises(ZeroState):
        center_of_mass(PairState.zeros(g))
