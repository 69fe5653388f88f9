"""Radial reference problems: scalar ground states, the embedding constant and
the vectorial quotients.

Scalar ground state
    The positive radial solution of ``-Laplacian w + lam w = c w^{p-1}``,
    computed by Petviashvili's renormalised fixed-point iteration on the
    radial ray.  Its Nehari and Pohozaev identities are returned as audits.

Embedding constant
    ``S = inf ||u||_lam / |u|_p``, attained at the ``c = 1`` ground state,
    where it equals ``||w||_lam^{1 - 2/p}``.

Quotients
    ``lambda_quotient`` is the ratio of the uncoupled energy to the coupling
    term; ``coupling_quotient`` is the value of ``beta`` for which a given
    pair would satisfy the Nehari identity.  Both are minimised over
    nonnegative radial pairs by projected descent.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .bounds import lambda_lower_bound
from .descent import SolverConfig, SolverReport, armijo_descent
from .errors import ConfigError, NoConvergence, ZeroState
from .functional import ProblemParams, energy, term_gradients
from .grid import PairState, RadialGrid
from .minimize import descend

__all__ = [
    "ScalarGroundState",
    "QuotientMinimizer",
    "solve_scalar_ground",
    "sobolev_constant",
    "sobolev_refinement",
    "lambda_quotient",
    "coupling_quotient",
    "minimize_quotient_Lambda",
    "minimize_coupling_quotient",
    "minimize_I0",
    "strauss_diagnostic",
    "gaussian_pair",
]


@dataclass(frozen=True)
class ScalarGroundState:
    w: np.ndarray
    grid: RadialGrid
    lam: float
    c: float
    p: float
    energy: float
    norm2: float
    nehari_res: float
    pohozaev_res: float
    residual: float
    iterations: int

    @property
    def is_positive_decreasing(self) -> bool:
        # the far tail sits at roundoff level, so signs are judged relative
        # to the peak and monotonicity only where the profile is resolved
        peak = self.w[0]
        w = self.w[self.w > 1e-10 * peak]
        return bool(np.all(self.w >= -1e-14 * peak) and np.all(np.diff(w) <= 0.0))


@dataclass(frozen=True)
class QuotientMinimizer:
    pair: PairState
    Lambda: float
    lower_bound: float
    report: SolverReport
    # the descent found a direction along which the quotient is unbounded below
    unbounded: bool = False

    @property
    def component_fractions(self) -> tuple[float, float]:
        g = self.pair.grid
        m = self.pair.mass()
        return g.inner(self.pair.u, self.pair.u) / m, g.inner(self.pair.v, self.pair.v) / m


def _scalar_terms(w: np.ndarray, lam: float, c: float, p: float, grid: RadialGrid):
    grad2 = grid.gradient_sq_integral(w)
    mass = grid.inner(w, w)
    powp = grid.integrate(np.abs(w) ** p)
    return grad2, mass, powp


def solve_scalar_ground(
    lam: float,
    c: float,
    p: float,
    grid: Optional[RadialGrid] = None,
    tol: float = 1e-10,
    max_iter: int = 5000,
    width: float = 1.0,
) -> ScalarGroundState:
    """Positive radial solution of ``-Laplacian w + lam w = c |w|^{p-2} w``.

    Petviashvili iteration ``w <- M^{(p-1)/(p-2)} (lam - Laplacian)^{-1} c w^{p-1}``
    with the stabilising factor ``M = <w, (lam - Laplacian) w> / <w, c w^{p-1}>``,
    which equals 1 at the solution.  ``width`` sets the Gaussian seed.
    """
    if lam <= 0 or c <= 0:
        raise ConfigError("lam and c must be positive")
    if not 2.0 < p < 6.0:
        raise ConfigError("the scalar problem needs 2 < p < 6")
    grid = grid or RadialGrid()
    r = grid.r
    w = np.exp(-((r / width) ** 2))
    gamma = (p - 1.0) / (p - 2.0)
    res = np.inf
    for it in range(1, max_iter + 1):
        Lw = grid.neg_laplacian(w) + lam * w
        Nw = c * np.abs(w) ** (p - 2.0) * w
        M = grid.inner(w, Lw) / grid.inner(w, Nw)
        w_new = M**gamma * grid.resolvent(Nw, lam)
        w = w_new
        Lw = grid.neg_laplacian(w) + lam * w
        Nw = c * np.abs(w) ** (p - 2.0) * w
        R = Lw - Nw
        scale = np.sqrt(grid.inner(Lw, Lw)) + np.sqrt(grid.inner(Nw, Nw))
        res = np.sqrt(grid.inner(R, R)) / scale
        if res < tol:
            break
    else:
        raise NoConvergence(f"scalar ground state stalled at relative residual {res:.2e}")
    grad2, mass, powp = _scalar_terms(w, lam, c, p, grid)
    norm2 = grad2 + lam * mass
    neh = (norm2 - c * powp) / (norm2 + c * powp)
    lhs = 0.5 * grad2 + 1.5 * lam * mass
    rhs = 3.0 * c / p * powp
    poh = (lhs - rhs) / (lhs + rhs)
    return ScalarGroundState(
        w=w,
        grid=grid,
        lam=lam,
        c=c,
        p=p,
        energy=0.5 * norm2 - c / p * powp,
        norm2=norm2,
        nehari_res=neh,
        pohozaev_res=poh,
        residual=res,
        iterations=it,
    )


def sobolev_constant(lam: float, p: float, grid: Optional[RadialGrid] = None) -> float:
    """``inf ||u||_lam / |u|_p`` with ``||u||_lam^2 = int |grad u|^2 + lam u^2``."""
    gs = solve_scalar_ground(lam, 1.0, p, grid)
    return float(gs.norm2 ** (0.5 - 1.0 / p))


def sobolev_refinement(lam: float, p: float, grid: Optional[RadialGrid] = None) -> tuple[float, float, float]:
    """``(S_fine, S_coarse, |difference|)`` on ``grid`` and on half its resolution."""
    grid = grid or RadialGrid()
    coarse = RadialGrid(grid.m // 2, grid.R)
    s_f = sobolev_constant(lam, p, grid)
    s_c = sobolev_constant(lam, p, coarse)
    return s_f, s_c, abs(s_f - s_c)


# ---------------------------------------------------------------------------
# quotients over radial pairs


# (kinetic, external, coulomb, power) weights of the numerator and the
# weight of the beta = 1 cross term in the denominator
_LAMBDA_WEIGHTS = ((1.0, 1.0, 1.0, 1.0), 1.0)


def _coupling_weights(p: float):
    return ((2.0, 2.0, 4.0, p), p)


def _quotient_objective(P: ProblemParams, weights):
    (wk, we, wc, wp), wd = weights

    def evaluate(s: PairState):
        e, gr = term_gradients(s, P)
        D = wd * e.cross
        if not D > 0:
            return np.inf, s.zeros(s.grid), 1.0
        N = wk * e.kinetic + we * e.external + wc * e.coulomb - wp * e.power
        Q = N / D
        gN = (
            gr["kinetic"].scaled(wk)
            .axpy(we, gr["external"])
            .axpy(wc, gr["coulomb"])
            .axpy(-wp, gr["power"])
        )
        gD = gr["cross"].scaled(wd)
        grad = gN.axpy(-Q, gD).scaled(1.0 / D)
        scale = (gN.l2() + abs(Q) * gD.l2()) / D
        return float(Q), grad, float(scale)

    return evaluate


def _quotient_value(s: PairState, P: ProblemParams, weights) -> float:
    (wk, we, wc, wp), wd = weights
    e = energy(s, P)
    D = wd * e.cross
    if not D > 0:
        raise ZeroState("the quotient needs both components nonzero on a common set")
    return (wk * e.kinetic + we * e.external + wc * e.coulomb - wp * e.power) / D


def _unit_problem(grid, p: float, theta, k) -> ProblemParams:
    if np.isscalar(theta) and np.isscalar(k):
        return ProblemParams.constant(grid, p, 1.0, theta, k)
    return ProblemParams(p=p, beta=1.0, V=theta, rho=k, grid=grid)


def lambda_quotient(s: PairState, theta, k, p: float) -> float:
    """Uncoupled energy with potentials ``(theta, k)`` over the coupling
    term ``(2/p) int |u v|^{p/2}``."""
    return _quotient_value(s, _unit_problem(s.grid, p, theta, k), _LAMBDA_WEIGHTS)


def coupling_quotient(s: PairState, V, rho, p: float) -> float:
    """The coupling ``beta`` for which ``s`` satisfies the Nehari identity:
    ``(||s||_V^2 + int rho phi n - int |u|^p + |v|^p) / (2 int |u v|^{p/2})``."""
    return _quotient_value(s, _unit_problem(s.grid, p, V, rho), _coupling_weights(p))


def gaussian_pair(grid, amp_u: float, width_u: float, amp_v: float, width_v: float,
                  center=(0.0, 0.0, 0.0)) -> PairState:
    """Pair of Gaussians ``amp exp(-|x - center|^2 / width^2)`` on either grid."""
    if isinstance(grid, RadialGrid):
        r2 = grid.r**2
    else:
        x, y, z = grid.coords
        c = np.asarray(center, dtype=float)
        r2 = (x - c[0]) ** 2 + (y - c[1]) ** 2 + (z - c[2]) ** 2
    return PairState(amp_u * np.exp(-r2 / width_u**2), amp_v * np.exp(-r2 / width_v**2), grid)


def _default_seeds(grid) -> list[PairState]:
    return [
        gaussian_pair(grid, 1.0, 2.0, 1.0, 2.0),
        gaussian_pair(grid, 0.5, 4.0, 0.5, 4.0),
        gaussian_pair(grid, 2.0, 1.0, 2.0, 1.0),
        gaussian_pair(grid, 1.0, 2.0, 0.4, 3.0),
    ]


def _minimize_quotient(P, weights, seeds, cfg) -> tuple[PairState, float, SolverReport]:
    best = None
    for seed in seeds:
        x, rep = armijo_descent(seed, _quotient_objective(P, weights), cfg, retract=PairState.clipped)
        q = rep.energy_trace[-1]
        if best is None or q < best[1]:
            best = (x, q, rep)
    return best


def minimize_quotient_Lambda(
    theta: float,
    k: float,
    p: float,
    grid: Optional[RadialGrid] = None,
    seeds: Optional[Iterable[PairState]] = None,
    cfg: Optional[SolverConfig] = None,
) -> QuotientMinimizer:
    """Minimise :func:`lambda_quotient` over nonnegative radial pairs (multistart).

    When the descent escapes to ``-inf`` (one component dying out while the
    single-component energy is negative) the result reports ``Lambda = -inf``
    with ``unbounded=True``.
    """
    if theta <= 0 or k <= 0:
        raise ConfigError("theta and k must be positive")
    if not 2.0 < p < 3.0:
        raise ConfigError("the quotient is studied for 2 < p < 3")
    grid = grid or RadialGrid(2000, 40.0)
    cfg = cfg or SolverConfig(max_iters=4000, grad_tol=1e-7, mu=theta)
    P = _unit_problem(grid, p, theta, k)
    seeds = list(seeds) if seeds is not None else _default_seeds(grid)
    x, q, rep = _minimize_quotient(P, _LAMBDA_WEIGHTS, seeds, cfg)
    m = QuotientMinimizer(x, q, lambda_lower_bound(theta, k, p), rep)
    # A vanishing component drives the denominator to zero while the numerator
    # tends to the negative single-component value, so the infimum is -inf.
    if rep.diverged or (q < 0 and min(m.component_fractions) < 1e-6):
        m = QuotientMinimizer(x, float("-inf"), m.lower_bound, rep, unbounded=True)
    return m


def minimize_coupling_quotient(
    V: float,
    rho: float,
    p: float,
    grid: Optional[RadialGrid] = None,
    seeds: Optional[Iterable[PairState]] = None,
    cfg: Optional[SolverConfig] = None,
) -> tuple[PairState, float, SolverReport]:
    """Adversarial descent on :func:`coupling_quotient` with constant potentials."""
    grid = grid or RadialGrid(2000, 40.0)
    cfg = cfg or SolverConfig(max_iters=2000, grad_tol=1e-7, mu=V)
    P = _unit_problem(grid, p, V, rho)
    seeds = list(seeds) if seeds is not None else _default_seeds(grid)
    return _minimize_quotient(P, _coupling_weights(p), seeds, cfg)


def minimize_I0(
    P: ProblemParams, z0: Optional[np.ndarray] = None, cfg: Optional[SolverConfig] = None
) -> tuple[np.ndarray, float, SolverReport]:
    """Minimise the single-component energy ``J(z, 0)`` over nonnegative ``z``.

    The second component stays identically zero along the flow because every
    term of its gradient carries a factor of it.
    """
    grid = P.grid
    if z0 is None:
        z0 = gaussian_pair(grid, 1.0, 2.0, 0.0, 1.0).u
    cfg = cfg or SolverConfig(nonneg_projection=True, mu=max(P.lam, 1e-3))
    s0 = PairState(np.asarray(z0, dtype=float), grid.zeros(), grid)
    x, rep = descend(s0, P.with_beta(0.0), cfg, guarded=True)
    return x.u, rep.energy_trace[-1], rep


def strauss_diagnostic(f: np.ndarray, grid: RadialGrid) -> float:
    """``max_{r >= 5 dr} r |f(r)| / ||f||_{H^1}`` for a radial profile."""
    norm2 = grid.gradient_sq_integral(f) + grid.inner(f, f)
    if not norm2 > 0:
        raise ZeroState("the Strauss diagnostic needs a nonzero profile")
    mask = grid.r >= 5.0 * grid.dr
    return float(np.max(grid.r[mask] * np.abs(f[mask])) / np.sqrt(norm2))
