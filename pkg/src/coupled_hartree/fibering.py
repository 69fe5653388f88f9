"""The map ``t -> J(t u, t v)`` along a ray, its critical points and branches.

Along a ray the energy is a three-term polynomial in ``t``,

    phi(t) = A t^2 / 2 + B t^4 / 4 - C t^p / p,

with ``A = ||(u, v)||^2``, ``B = int rho phi (u^2 + v^2)`` and ``C = int F``.
Writing ``phi'(t) = t^3 (eta(t) + B)`` with ``eta(t) = A t^-2 - C t^{p-4}``
reduces the search for critical points to the level set ``eta = -B``.  For
``2 < p < 4`` the function ``eta`` decreases to a single minimum at
``t_dip`` and then increases towards 0, so the ray meets the Nehari set
twice, once, or not at all according to the sign of ``eta(t_dip) + B``.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy import optimize

from .bounds import filtration_level, xbar
from .errors import ConfigError, NoPositivePower, NotApplicable, RootAbsent, ZeroState
from .functional import EnergyBreakdown, ProblemParams, energy, nehari_residual
from .grid import PairState

__all__ = [
    "FiberingCoefficients",
    "FiberingRoots",
    "NehariClass",
    "coefficients",
    "find_roots",
    "classify",
    "project_to_nehari",
    "filtration_member",
    "DEGENERATE_TOL",
    "ROOT_TOL",
]

ROOT_TOL = 1e-12
DEGENERATE_TOL = 1e-9
_T_CAP = 2.0**60


@dataclass(frozen=True)
class FiberingCoefficients:
    A: float
    B: float
    C: float
    p: float

    @classmethod
    def from_breakdown(cls, e: EnergyBreakdown, p: float) -> "FiberingCoefficients":
        return cls(2.0 * (e.kinetic + e.external), 4.0 * e.coulomb, p * (e.power + e.cross), p)

    def phi(self, t):
        t = np.asarray(t, dtype=float)
        return 0.5 * self.A * t**2 + 0.25 * self.B * t**4 - self.C * t**self.p / self.p

    def dphi(self, t):
        t = np.asarray(t, dtype=float)
        return self.A * t + self.B * t**3 - self.C * t ** (self.p - 1.0)

    def d2phi(self, t):
        t = np.asarray(t, dtype=float)
        return self.A + 3.0 * self.B * t**2 - (self.p - 1.0) * self.C * t ** (self.p - 2.0)

    def eta(self, t):
        t = np.asarray(t, dtype=float)
        return self.A * t**-2.0 - self.C * t ** (self.p - 4.0)

    def dphi_scale(self, t: float) -> float:
        """Sum of the magnitudes of the three terms of ``phi'(t)``."""
        return self.A * t + self.B * t**3 + abs(self.C) * t ** (self.p - 1.0)

    @property
    def branch_sign(self) -> float:
        """``phi''(1)`` rewritten with ``C = A + B``: ``-(p-2) A + (4-p) B``."""
        return -(self.p - 2.0) * self.A + (4.0 - self.p) * self.B

    @property
    def branch_sign_alt(self) -> float:
        """``phi''(1)`` rewritten with ``B = C - A``: ``-2A + (4-p) C``."""
        return -2.0 * self.A + (4.0 - self.p) * self.C


@dataclass(frozen=True)
class FiberingRoots:
    t_minus: Optional[float]
    t_plus: Optional[float]
    t_dip: float
    dip_value: float
    degenerate: bool = False


class NehariClass(str, Enum):
    MINUS = "Nminus"
    ZERO = "Nzero"
    PLUS = "Nplus"
    OFF = "NotOnNehari"


def coefficients(s: PairState, P: ProblemParams) -> FiberingCoefficients:
    if s.is_zero():
        raise ZeroState("the fibering map of (0, 0) is identically zero")
    return FiberingCoefficients.from_breakdown(energy(s, P), P.p)


def _reduced(c: FiberingCoefficients, x: float) -> float:
    """``phi'(t) / t = A + B t^2 - C t^{p-2}`` at ``t = e^x``; same sign as
    ``eta + B`` but free of overflow for tiny ``t``."""
    with np.errstate(over="ignore", under="ignore"):
        return c.A + c.B * np.exp(2.0 * x) - c.C * np.exp((c.p - 2.0) * x)


def _root(c: FiberingCoefficients, lo: float, hi: float) -> float:
    """Zero of ``phi'(t)/t`` for ``log t`` in ``[lo, hi]`` (sign change assumed)."""
    x = optimize.brentq(
        lambda y: _reduced(c, y), lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200
    )
    return float(np.exp(x))


def find_roots(c: FiberingCoefficients) -> FiberingRoots:
    """Critical points ``t_minus < t_dip < t_plus`` of the fibering map."""
    p = c.p
    if not c.A > 0:
        raise ZeroState("the quadratic coefficient must be positive")
    if c.C <= 0:
        raise NoPositivePower("no p-power mass: phi' > 0 on the whole ray")
    if p >= 4.0:
        raise NotApplicable("the two-root structure needs 2 < p < 4")
    x_dip = np.log(2.0 * c.A / ((4.0 - p) * c.C)) / (p - 2.0)
    t_dip = float(np.exp(x_dip))
    with np.errstate(over="ignore"):
        # eta(t_dip) simplifies to -A t_dip^-2 (p-2)/(4-p)
        edip = float(np.exp(-2.0 * x_dip))
    dip = -c.A * edip * (p - 2.0) / (4.0 - p) + c.B
    if c.B == 0.0:
        # two-term map: single crossing, eta + B -> 0 from below at infinity
        t_star = float(np.exp(np.log(c.A / c.C) / (p - 2.0)))
        return FiberingRoots(t_star, None, t_dip, dip)
    scale = 2.0 * c.A * edip / (4.0 - p) + c.B
    if abs(dip) < DEGENERATE_TOL * scale:
        return FiberingRoots(None, None, t_dip, dip, degenerate=True)
    if dip > 0:
        return FiberingRoots(None, None, t_dip, dip)
    lo = x_dip - np.log(2.0)
    while _reduced(c, lo) <= 0:
        lo -= np.log(2.0)
    hi = x_dip + np.log(2.0)
    while _reduced(c, hi) <= 0:
        hi += np.log(2.0)
        if hi > np.log(_T_CAP):
            raise RootAbsent("upper root bracket exceeded 2^60")
    return FiberingRoots(_root(c, lo, x_dip), _root(c, x_dip, hi), t_dip, float(dip))


def classify(s: PairState, P: ProblemParams, tol: float = 1e-8) -> NehariClass:
    """Which piece of the Nehari set ``s`` lies on (or that it is off it)."""
    if s.is_zero():
        return NehariClass.OFF
    res = nehari_residual(s, P)
    if res.relative >= tol:
        return NehariClass.OFF
    c = coefficients(s, P)
    sigma = c.branch_sign
    if abs(sigma) < tol * (c.A + c.B + c.C):
        return NehariClass.ZERO
    return NehariClass.PLUS if sigma > 0 else NehariClass.MINUS


def project_to_nehari(s: PairState, P: ProblemParams, branch: str = "minus") -> PairState:
    """Rescale ``s`` onto the Nehari set along its ray."""
    if branch not in ("minus", "plus"):
        raise ConfigError(f"branch must be 'minus' or 'plus', got {branch!r}")
    c = coefficients(s, P)
    roots = find_roots(c)
    if roots.degenerate:
        raise RootAbsent("the ray is tangent to the Nehari set; projection is ill-posed")
    t = roots.t_minus if branch == "minus" else roots.t_plus
    if t is None:
        raise RootAbsent(f"no {branch} root on this ray")
    return s.scaled(t)


def filtration_member(s: PairState, P: ProblemParams, tol: float = 1e-8) -> str:
    """``"N1"``, ``"N2"`` or ``"outside"``: low-energy split of the Nehari set
    by the squared-norm threshold."""
    if not 2.0 < P.p < 4.0:
        raise NotApplicable("the filtration is defined for 2 < p < 4")
    if nehari_residual(s, P).relative >= tol:
        raise ConfigError("filtration membership is only defined on the Nehari set")
    e = energy(s, P)
    norm2 = 2.0 * (e.kinetic + e.external)
    if e.total >= filtration_level(P.lam, P.rho_max, P.p):
        return "outside"
    x_bar = xbar(P.lam, P.rho_max, P.p)
    if norm2 < x_bar:
        return "N1"
    if norm2 > x_bar:
        return "N2"
    return "outside"
