import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coupled_hartree.descent import SolverConfig, SolverReport, armijo_descent, sobolev_preconditioner
from coupled_hartree.errors import ConfigError, Diverged, NotApplicable, RootAbsent
from coupled_hartree.fibering import NehariClass, classify
from coupled_hartree.functional import ProblemParams, energy, nehari_residual
from coupled_hartree.grid import GridSpec, PairState, RadialGrid
from coupled_hartree.minimize import descend, is_coercive, nehari_minimize, radial_descend
from coupled_hartree.reference import gaussian_pair

G = GridSpec(8, 2.0)


def quadratic(target: PairState):
    def evaluate(x: PairState):
        d = x.axpy(-1.0, target)
        return 0.5 * d.dot(d), d, 1.0 + 0.5 * target.dot(target)

    return evaluate


@given(st.integers(0, 2**32 - 1), st.booleans())
@settings(max_examples=10)
def test_descent_solves_quadratic(seed, preconditioned):
    rng = np.random.default_rng(seed)
    target = PairState(rng.standard_normal(G.shape), rng.standard_normal(G.shape), G)
    cfg = SolverConfig(max_iters=500, grad_tol=1e-10, preconditioned=preconditioned)
    x, rep = armijo_descent(PairState.zeros(G), quadratic(target), cfg)
    assert rep.converged
    assert rep.monotone
    assert x.axpy(-1, target).l2() < 1e-8 * (1 + target.l2())


def test_retraction_failures_are_rejected_steps():
    target = PairState(np.ones(G.shape), np.ones(G.shape), G)
    calls = {"n": 0}

    def retract(y):
        calls["n"] += 1
        if calls["n"] % 2:
            raise RootAbsent("odd call")
        return y

    cfg = SolverConfig(max_iters=200, grad_tol=1e-8)
    x, rep = armijo_descent(PairState.zeros(G), quadratic(target), cfg, retract=retract)
    assert rep.converged and rep.monotone


def test_nonnegative_retraction_gives_projected_minimum():
    target = PairState(np.full(G.shape, -1.0), np.full(G.shape, 2.0), G)
    cfg = SolverConfig(max_iters=200, grad_tol=1e-12)
    x, rep = armijo_descent(
        PairState(np.ones(G.shape), np.ones(G.shape), G), quadratic(target), cfg, retract=PairState.clipped
    )
    assert np.allclose(x.u, 0.0) and np.allclose(x.v, 2.0)
    assert rep.monotone


def test_unbounded_objective_triggers_divergence():
    # concave objective: iterates grow geometrically
    c = PairState(np.ones(G.shape), np.ones(G.shape), G)

    def evaluate(x):
        return -0.5 * x.dot(x), x.scaled(-1.0), 1.0

    with pytest.raises(Diverged):
        armijo_descent(c, evaluate, SolverConfig(max_iters=200), raise_on_divergence=True)
    _, rep = armijo_descent(c, evaluate, SolverConfig(max_iters=200))
    assert rep.diverged and not rep.converged


def test_preconditioner_inverts_metric():
    apply, metric = sobolev_preconditioner(2.0)
    x = gaussian_pair(G, 1.0, 0.7, 0.5, 1.1)
    back = apply(metric(x))
    assert np.allclose(back.u, x.u, atol=1e-12) and np.allclose(back.v, x.v, atol=1e-12)


@pytest.mark.parametrize(
    "kwargs", [{"grad_tol": 0.0}, {"c1": 1.5}, {"backtrack": 1.0}, {"seeds": ()}, {"mu": 0.0}, {"max_iters": -1}]
)
def test_solver_config_validation(kwargs):
    with pytest.raises(ConfigError):
        SolverConfig(**kwargs)


def test_report_monotone_flag():
    assert SolverReport(energy_trace=[3.0, 2.0, 2.0, 1.0]).monotone
    assert not SolverReport(energy_trace=[3.0, 2.0, 2.5]).monotone
    assert "converged" in SolverReport().as_dict()


def test_descend_from_zero_is_immediate():
    P = ProblemParams.constant(G, 2.5, 1.0)
    x, rep = descend(PairState.zeros(G), P)
    assert x.is_zero() and rep.converged


def test_coercive_window():
    assert is_coercive(ProblemParams.constant(G, 2.5, 0.4, 1.0, 1.0))
    assert not is_coercive(ProblemParams.constant(G, 2.5, 0.6, 1.0, 1.0))
    assert not is_coercive(ProblemParams.constant(G, 3.5, 0.1, 1.0, 1.0))


def test_radial_descent_decreases_energy_to_negative_state():
    ray = RadialGrid(800, 30.0)
    P = ProblemParams.constant(ray, 2.5, 1.0, 1.0, 0.01)
    s0 = gaussian_pair(ray, 5.0, 2.0, 5.0, 2.0)
    assert energy(s0, P).total < 0
    x, rep = radial_descend(s0, P, SolverConfig(max_iters=2000, grad_tol=1e-7, nonneg_projection=True))
    assert rep.monotone and rep.converged
    assert rep.energy_trace[-1] < rep.energy_trace[0]
    with pytest.raises(ConfigError):
        radial_descend(gaussian_pair(G, 1, 1, 1, 1), ProblemParams.constant(G, 2.5, 1.0))


def test_nehari_descent_stays_on_lower_branch():
    ray = RadialGrid(800, 30.0)
    P = ProblemParams.constant(ray, 3.5, 10.0, 1.0, 0.1)
    s0 = gaussian_pair(ray, 1.0, 1.5, 1.0, 1.5)
    x, e, rep = nehari_minimize(P, s0, SolverConfig(max_iters=300, grad_tol=1e-8, nonneg_projection=True))
    assert rep.monotone
    assert nehari_residual(x, P).relative < 1e-10
    assert classify(x, P) == NehariClass.MINUS
    assert e == pytest.approx(energy(x, P).total)
    assert e <= rep.energy_trace[0]


def test_nehari_descent_exponent_range():
    P = ProblemParams.constant(G, 4.5, 1.0)
    with pytest.raises(NotApplicable):
        nehari_minimize(P, gaussian_pair(G, 1, 1, 1, 1))


def test_nehari_descent_warns_below_sufficient_coupling():
    ray = RadialGrid(200, 20.0)
    P = ProblemParams.constant(ray, 3.5, 10.0, 1.0, 0.1)
    with pytest.warns(UserWarning):
        nehari_minimize(P, gaussian_pair(ray, 1, 1.5, 1, 1.5), SolverConfig(max_iters=2), beta_floor=100.0)
