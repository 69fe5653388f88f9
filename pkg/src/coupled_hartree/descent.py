"""Monotone line-search descent on pairs of grid fields.

One engine serves every minimisation in the package: the energy itself, the
energy restricted to a Nehari branch, and the scalar quotients of the
reference module.  The caller supplies

* ``evaluate(x) -> (value, gradient, scale)`` with an L2 gradient and a
  magnitude used to report a relative gradient norm;
* optionally ``retract(y)``, mapping a trial point back to the feasible set
  (nonnegative clipping, rescaling onto a Nehari branch, ...).  A retraction
  may raise :class:`~coupled_hartree.errors.RootAbsent`, which counts as a
  rejected trial step.

Search directions are the negative gradient, optionally preconditioned by the
resolvent ``(-Laplacian + mu)^{-1}``; initial trial steps come from the
Barzilai-Borwein formula in the matching metric, and the Armijo test with
halving keeps every accepted step energy-decreasing.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, Diverged, RootAbsent
from .grid import PairState

__all__ = ["SolverConfig", "SolverReport", "armijo_descent", "sobolev_preconditioner"]

Evaluate = Callable[[PairState], tuple[float, PairState, float]]


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 3000
    grad_tol: float = 1e-6
    c1: float = 1e-4
    backtrack: float = 0.5
    step0: float = 1.0
    max_backtracks: int = 60
    preconditioned: bool = True
    mu: float = 1.0
    nonneg_projection: bool = False
    seeds: tuple[str, ...] = ("gaussian",)
    # energies below -divergence_factor * |initial scale| count as unbounded
    divergence_factor: float = 1e6
    max_step: float = 1e4

    def __post_init__(self) -> None:
        if not self.grad_tol > 0:
            raise ConfigError("grad_tol must be positive")
        if not 0 < self.c1 < 1 or not 0 < self.backtrack < 1:
            raise ConfigError("Armijo parameters must lie in (0, 1)")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if self.max_iters < 0 or self.mu <= 0:
            raise ConfigError("max_iters must be >= 0 and mu > 0")


@dataclass
class SolverReport:
    iterations: int = 0
    final_grad_norm: float = float("nan")
    energy_trace: list = field(default_factory=list)
    converged: bool = False
    wall_time: float = 0.0
    diverged: bool = False
    message: str = ""

    @property
    def monotone(self) -> bool:
        e = np.asarray(self.energy_trace)
        return bool(np.all(np.diff(e) <= 0.0))

    def as_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "final_grad_norm": self.final_grad_norm,
            "final_energy": self.energy_trace[-1] if self.energy_trace else None,
            "converged": self.converged,
            "diverged": self.diverged,
            "monotone": self.monotone,
            "wall_time": self.wall_time,
            "message": self.message,
        }


def sobolev_preconditioner(mu: float) -> tuple[Callable, Callable]:
    """``(apply, metric)`` for the resolvent ``(-Laplacian + mu)^{-1}``.

    ``apply`` maps a gradient to a direction; ``metric`` applies the inverse
    operator and is used by the Barzilai-Borwein step.
    """

    def apply(g: PairState) -> PairState:
        grid = g.grid
        return PairState(grid.resolvent(g.u, mu), grid.resolvent(g.v, mu), grid)

    def metric(d: PairState) -> PairState:
        grid = d.grid
        return PairState(
            grid.neg_laplacian(d.u) + mu * d.u, grid.neg_laplacian(d.v) + mu * d.v, grid
        )

    return apply, metric


def _identity(g: PairState) -> PairState:
    return g


def armijo_descent(
    x0: PairState,
    evaluate: Evaluate,
    cfg: SolverConfig,
    retract: Optional[Callable[[PairState], PairState]] = None,
    raise_on_divergence: bool = False,
) -> tuple[PairState, SolverReport]:
    """Minimise by monotone Armijo descent; returns the last iterate and a report."""
    t0 = time.perf_counter()
    if cfg.preconditioned:
        apply, metric = sobolev_preconditioner(cfg.mu)
    else:
        apply, metric = _identity, _identity
    retract = retract or (lambda y: y)
    report = SolverReport()

    x = x0
    f, g, scale = evaluate(x)
    scale0 = max(abs(scale), abs(f), 1e-300)
    report.energy_trace.append(f)
    step = cfg.step0
    prev: Optional[tuple[PairState, PairState]] = None

    for it in range(cfg.max_iters + 1):
        gnorm = g.l2()
        rel = gnorm / scale if scale > 0 else gnorm
        report.final_grad_norm = rel
        report.iterations = it
        if rel < cfg.grad_tol or gnorm == 0.0:
            report.converged = True
            report.message = "gradient tolerance reached"
            break
        if it == cfg.max_iters:
            report.message = "iteration limit"
            break

        d = apply(g).scaled(-1.0)
        if prev is not None:
            dx = x.axpy(-1.0, prev[0])
            dg = g.axpy(-1.0, prev[1])
            denom = dx.dot(dg)
            if denom > 0:
                step = dx.dot(metric(dx)) / denom
        step = min(step, cfg.max_step)

        accepted = False
        trial_step = step
        for _ in range(cfg.max_backtracks):
            try:
                y = retract(x.axpy(trial_step, d))
            except RootAbsent:
                trial_step *= cfg.backtrack
                continue
            # projected Armijo test: the predicted decrease is measured along
            # the actual displacement, which equals trial_step * d without
            # a retraction
            predicted = g.dot(y.axpy(-1.0, x))
            if not predicted < 0:
                trial_step *= cfg.backtrack
                continue
            fy, gy, sy = evaluate(y)
            if np.isfinite(fy) and fy <= f + cfg.c1 * predicted:
                accepted = True
                break
            trial_step *= cfg.backtrack
        if not accepted:
            report.message = "line search stalled"
            break

        prev = (x, g)
        x, f, g, scale = y, fy, gy, sy
        step = trial_step
        report.energy_trace.append(f)
        if f < -cfg.divergence_factor * scale0:
            report.diverged = True
            report.message = "energy fell below the divergence sentinel"
            report.iterations = it + 1
            break

    report.wall_time = time.perf_counter() - t0
    if report.diverged and raise_on_divergence:
        raise Diverged(report.message)
    return x, report
