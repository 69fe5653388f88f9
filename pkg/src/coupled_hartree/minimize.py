"""Minimisation drivers: global descent, radial descent and Nehari-branch descent.

All three run :func:`~coupled_hartree.descent.armijo_descent` on the energy;
they differ in the feasible set.  ``descend`` works on the whole space (or
its nonnegative cone), ``radial_descend`` does the same on a radial ray, and
``nehari_minimize`` rescales every trial point onto the lower fibering root so
that the iterates stay on the branch of the Nehari set that carries the
low-energy solutions.
"""
from __future__ import annotations

import warnings
from typing import Optional

from .bounds import coercive_upper
from .descent import SolverConfig, SolverReport, armijo_descent
from .errors import ConfigError, NotApplicable
from .fibering import project_to_nehari
from .functional import ProblemParams, energy, energy_and_gradient
from .grid import PairState, RadialGrid

__all__ = [
    "SolverConfig",
    "SolverReport",
    "is_coercive",
    "descend",
    "radial_descend",
    "nehari_minimize",
]


def is_coercive(P: ProblemParams) -> bool:
    """True when the energy is known to be bounded below.

    That needs ``2 < p < 3`` and a coupling below the window end computed
    from the potentials at infinity.
    """
    if not 2.0 < P.p < 3.0:
        return False
    return P.beta < coercive_upper(P.V_inf, P.rho_inf, P.p)


def _energy_objective(P: ProblemParams):
    def evaluate(s: PairState):
        e, g, scale = energy_and_gradient(s, P)
        return e.total, g, scale

    return evaluate


def descend(
    s0: PairState,
    P: ProblemParams,
    cfg: SolverConfig = SolverConfig(),
    guarded: Optional[bool] = None,
) -> tuple[PairState, SolverReport]:
    """Armijo descent on the energy from ``s0``.

    ``guarded`` defaults to :func:`is_coercive`.  An unguarded run that falls
    below the divergence sentinel raises :class:`Diverged`; a guarded one
    reports it in the returned :class:`SolverReport`.
    """
    if s0.is_zero():
        rep = SolverReport(final_grad_norm=0.0, energy_trace=[0.0], converged=True,
                           message="started at a critical point")
        return s0, rep
    guarded = is_coercive(P) if guarded is None else guarded
    retract = PairState.clipped if cfg.nonneg_projection else None
    x, rep = armijo_descent(
        s0, _energy_objective(P), cfg, retract=retract, raise_on_divergence=not guarded
    )
    if not guarded:
        rep.message = (rep.message + "; unguarded run").lstrip("; ")
    return x, rep


def radial_descend(
    s0: PairState, P: ProblemParams, cfg: SolverConfig = SolverConfig()
) -> tuple[PairState, SolverReport]:
    """:func:`descend` restricted to radial pairs; the final energy estimates
    the radial infimum."""
    if not isinstance(s0.grid, RadialGrid):
        raise ConfigError("radial_descend needs a pair on a RadialGrid")
    return descend(s0, P, cfg, guarded=True)


def nehari_minimize(
    P: ProblemParams,
    s0: PairState,
    cfg: SolverConfig = SolverConfig(),
    beta_floor: Optional[float] = None,
) -> tuple[PairState, float, SolverReport]:
    """Minimise the energy over the lower Nehari branch starting from ``s0``.

    Every trial point is rescaled to its lower fibering root; rays without
    one are rejected by the line search.  Returns the minimiser, its energy
    and the solver report.  ``beta_floor`` is a sufficient coupling threshold;
    runs below it only warn, since the threshold is not necessary.
    """
    if not 2.0 < P.p < 4.0:
        raise NotApplicable("Nehari-branch minimisation needs 2 < p < 4")
    if beta_floor is not None and P.beta < beta_floor:
        warnings.warn(
            f"beta={P.beta:g} is below the sufficient threshold {beta_floor:g}",
            stacklevel=2,
        )

    def retract(y: PairState) -> PairState:
        if cfg.nonneg_projection:
            y = y.clipped()
        return project_to_nehari(y, P, "minus")

    x0 = retract(s0)
    x, rep = armijo_descent(x0, _energy_objective(P), cfg, retract=retract)
    return x, energy(x, P).total, rep
