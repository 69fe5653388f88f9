"""Energy of the coupled system, its first variation, and solution audits.

For a pair ``s = (u, v)`` with ``n = u^2 + v^2`` the energy is

    J(u, v) = 1/2 int |grad u|^2 + |grad v|^2 + V n
            + 1/4 int rho phi[rho n] n
            - 1/p int |u|^p + |v|^p + 2 beta |u|^{p/2} |v|^{p/2}.

The last integrand is written ``F(u, v)`` throughout.  The energy splits into
three homogeneous pieces of degree 2, 4 and p, which is what the fibering
analysis in :mod:`coupled_hartree.fibering` relies on.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

from .coulomb import potential
from .errors import (
    ConfigError,
    MissingGradientFields,
    NonPositivePotential,
    NotASolution,
    ZeroState,
)
from .grid import Grid, PairState

__all__ = [
    "ProblemParams",
    "EnergyBreakdown",
    "Residual",
    "energy",
    "first_variation",
    "term_gradients",
    "gradient_norm",
    "nehari_residual",
    "pohozaev_residual",
    "ZVectorReport",
    "z_vector_audit",
    "classify_nontriviality",
    "solution_energy_lower_bound",
    "F_beta",
]


@dataclass(frozen=True)
class ProblemParams:
    """Exponent, coupling and sampled potentials of one problem instance.

    ``x_grad_V`` and ``x_grad_rho`` hold the analytic fields ``x . grad V`` and
    ``x . grad rho``; they are only needed by the Pohozaev-type audits.  The
    scalar summaries (``lam = inf V`` and friends) come from the analytic
    family when available, otherwise from the samples.
    """

    p: float
    beta: float
    V: np.ndarray
    rho: np.ndarray
    grid: Grid
    x_grad_V: Optional[np.ndarray] = None
    x_grad_rho: Optional[np.ndarray] = None
    lam: float = field(default=float("nan"))
    V_max: float = field(default=float("nan"))
    V_inf: float = field(default=float("nan"))
    rho_min: float = field(default=float("nan"))
    rho_max: float = field(default=float("nan"))
    rho_inf: float = field(default=float("nan"))
    d0: Optional[float] = None
    # analytic (V, rho) profiles the samples came from, when there are any
    profiles: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not 2.0 < self.p < 6.0:
            raise ConfigError(f"exponent p must lie in (2, 6), got {self.p}")
        shape = self.grid.shape
        V = np.broadcast_to(np.asarray(self.V, dtype=float), shape)
        rho = np.broadcast_to(np.asarray(self.rho, dtype=float), shape)
        if np.min(V) <= 0:
            raise NonPositivePotential(f"V must be positive, min sample {np.min(V):.3g}")
        if np.min(rho) <= 0:
            raise NonPositivePotential(f"rho must be positive, min sample {np.min(rho):.3g}")
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "rho", rho)
        defaults = {
            "lam": float(np.min(V)),
            "V_max": float(np.max(V)),
            "V_inf": float(np.max(V)),
            "rho_min": float(np.min(rho)),
            "rho_max": float(np.max(rho)),
            "rho_inf": float(np.max(rho)),
        }
        for name, value in defaults.items():
            if np.isnan(getattr(self, name)):
                object.__setattr__(self, name, value)

    @classmethod
    def constant(
        cls, grid: Grid, p: float, beta: float, V: float = 1.0, rho: float = 1.0
    ) -> "ProblemParams":
        """Autonomous problem with constant potentials (d0 = 2V)."""
        zero = np.zeros(grid.shape)
        return cls(
            p=p,
            beta=beta,
            V=np.full(grid.shape, float(V)),
            rho=np.full(grid.shape, float(rho)),
            grid=grid,
            x_grad_V=zero,
            x_grad_rho=zero,
            d0=2.0 * V,
        )

    def with_beta(self, beta: float) -> "ProblemParams":
        return replace(self, beta=beta)


@dataclass(frozen=True)
class EnergyBreakdown:
    kinetic: float
    external: float
    coulomb: float
    power: float
    cross: float

    @property
    def total(self) -> float:
        return self.kinetic + self.external + self.coulomb - self.power - self.cross

    @property
    def scale(self) -> float:
        return self.kinetic + self.external + self.coulomb + self.power + abs(self.cross)


class Residual(NamedTuple):
    """A residual together with the sum of the magnitudes of its terms."""

    value: float
    scale: float

    @property
    def relative(self) -> float:
        return abs(self.value) / self.scale if self.scale > 0 else abs(self.value)


def F_beta(u: np.ndarray, v: np.ndarray, p: float, beta: float) -> np.ndarray:
    """``|u|^p + |v|^p + 2 beta |u|^{p/2} |v|^{p/2}`` pointwise."""
    au, av = np.abs(u), np.abs(v)
    return au**p + av**p + 2.0 * beta * (au * av) ** (p / 2.0)


def _charge(s: PairState, P: ProblemParams) -> tuple[np.ndarray, np.ndarray]:
    n = s.u**2 + s.v**2
    return n, P.rho * n


def _breakdown(s: PairState, P: ProblemParams, phi: np.ndarray) -> EnergyBreakdown:
    g = s.grid
    n, q = _charge(s, P)
    au, av = np.abs(s.u), np.abs(s.v)
    p = P.p
    return EnergyBreakdown(
        kinetic=0.5 * (g.gradient_sq_integral(s.u) + g.gradient_sq_integral(s.v)),
        external=0.5 * g.integrate(P.V * n),
        coulomb=0.25 * g.inner(q, phi),
        power=g.integrate(au**p + av**p) / p,
        cross=2.0 * P.beta * g.integrate((au * av) ** (p / 2.0)) / p,
    )


def energy(s: PairState, P: ProblemParams) -> EnergyBreakdown:
    _check_grid(s, P)
    _, q = _charge(s, P)
    return _breakdown(s, P, potential(q, s.grid))


def _variation_terms(s: PairState, P: ProblemParams, phi: np.ndarray):
    """Per-component lists of the five terms of the Euler-Lagrange operator."""
    g = s.grid
    p, beta = P.p, P.beta
    out = []
    for a, b in ((s.u, s.v), (s.v, s.u)):
        aa, ab = np.abs(a), np.abs(b)
        out.append(
            (
                g.neg_laplacian(a),
                P.V * a,
                P.rho * phi * a,
                -(aa ** (p - 2.0)) * a,
                # |a|^{p/2-2} a extended continuously by 0 at a = 0
                -beta * ab ** (p / 2.0) * np.sign(a) * aa ** (p / 2.0 - 1.0),
            )
        )
    return out


def energy_and_gradient(
    s: PairState, P: ProblemParams
) -> tuple[EnergyBreakdown, PairState, float]:
    """Energy, L2 gradient and the magnitude scale of the gradient terms."""
    _check_grid(s, P)
    _, q = _charge(s, P)
    phi = potential(q, s.grid)
    e = _breakdown(s, P, phi)
    terms = _variation_terms(s, P, phi)
    gu, gv = (sum(t) for t in terms)
    g = s.grid
    scale = sum(np.sqrt(g.inner(t, t)) for comp in terms for t in comp)
    return e, PairState(gu, gv, g), float(scale)


def term_gradients(
    s: PairState, P: ProblemParams
) -> tuple[EnergyBreakdown, dict[str, PairState]]:
    """Energy pieces and the L2 gradient of each piece separately.

    Keys match the :class:`EnergyBreakdown` fields; the gradient of the
    energy is ``kinetic + external + coulomb - power - cross``.
    """
    _check_grid(s, P)
    _, q = _charge(s, P)
    phi = potential(q, s.grid)
    e = _breakdown(s, P, phi)
    (ku, eu, cu, pu, xu), (kv, ev, cv, pv, xv) = _variation_terms(s, P, phi)
    g = s.grid
    grads = {
        "kinetic": PairState(ku, kv, g),
        "external": PairState(eu, ev, g),
        "coulomb": PairState(cu, cv, g),
        "power": PairState(-pu, -pv, g),
        "cross": PairState(-xu, -xv, g),
    }
    return e, grads


def first_variation(s: PairState, P: ProblemParams) -> PairState:
    """L2 gradient ``(dJ/du, dJ/dv)``."""
    return energy_and_gradient(s, P)[1]


def gradient_norm(s: PairState, P: ProblemParams) -> Residual:
    """L2 norm of the first variation and the sum of its term norms."""
    _, grad, scale = energy_and_gradient(s, P)
    return Residual(grad.l2(), scale)


def _fibering_parts(e: EnergyBreakdown, p: float) -> tuple[float, float, float]:
    return 2.0 * (e.kinetic + e.external), 4.0 * e.coulomb, p * (e.power + e.cross)


def nehari_residual(s: PairState, P: ProblemParams) -> Residual:
    """``||s||^2 + int rho phi n - int F``; zero exactly on the Nehari set."""
    if s.is_zero():
        raise ZeroState("the Nehari functional is undefined at (0, 0)")
    A, B, C = _fibering_parts(energy(s, P), P.p)
    return Residual(A + B - C, A + B + C)


def _pohozaev_parts(s: PairState, P: ProblemParams):
    if P.x_grad_V is None or P.x_grad_rho is None:
        raise MissingGradientFields("x.grad V and x.grad rho are required")
    g = s.grid
    n, q = _charge(s, P)
    phi = potential(q, g)
    xV = np.broadcast_to(P.x_grad_V, g.shape)
    xr = np.broadcast_to(P.x_grad_rho, g.shape)
    z = np.array(
        [
            g.gradient_sq_integral(s.u) + g.gradient_sq_integral(s.v),
            g.integrate(P.V * n),
            g.integrate(xV * n),
            g.inner(q, phi),
            g.integrate(xr * phi * n),
            g.integrate(F_beta(s.u, s.v, P.p, P.beta)),
        ]
    )
    return z


def _pohozaev_from_z(z: np.ndarray, p: float) -> Residual:
    coeffs = np.array([0.5, 1.5, 0.5, 1.25, 0.5, -3.0 / p])
    terms = coeffs * z
    return Residual(float(np.sum(terms)), float(np.sum(np.abs(terms))))


def pohozaev_residual(s: PairState, P: ProblemParams) -> Residual:
    """Dilation identity satisfied by every solution.

    ``1/2 int |grad|^2 + 1/2 int (3V + x.grad V) n
    + 1/4 int (5 rho + 2 x.grad rho) phi n - 3/p int F``.
    """
    return _pohozaev_from_z(_pohozaev_parts(s, P), P.p)


@dataclass(frozen=True)
class ZVectorReport:
    z: np.ndarray
    energy: float
    nehari: Residual
    pohozaev: Residual
    t: float
    s: float
    r: float
    decomposition_residual: float
    signed: float

    @property
    def max_relative(self) -> float:
        return max(self.nehari.relative, self.pohozaev.relative, self.decomposition_residual)


def z_vector_audit(s: PairState, P: ProblemParams, tol: float = 1e-3) -> ZVectorReport:
    """Integral vector of a solution and the three linear identities it obeys.

    ``z = (int |grad|^2, int V n, int (x.grad V) n, int rho phi n,
    int (x.grad rho) phi n, int F)``.  With ``theta = J(s)`` every solution
    satisfies an energy row, the Nehari row and the Pohozaev row, whose
    general solution is

        z = theta/(p-2) (3(p-2), 6-p, 0, 0, 0, 2p)
            + t (p-2, -2(p-3), 0, 2(p-2), 0, p)
            + s (1, -1, 2, 0, 0, 0) + r (1, -1, 0, 0, 2, 0).

    The reported ``signed`` value ``-(p-2)(z1+z2) + (4-p) z4`` equals the
    second derivative of the fibering map at 1 and fixes the branch.
    Raises :class:`NotASolution` when a row residual exceeds ``10 tol``.
    """
    p = P.p
    z = _pohozaev_parts(s, P)
    theta = 0.5 * z[0] + 0.5 * z[1] + 0.25 * z[3] - z[5] / p
    neh_terms = np.array([z[0], z[1], z[3], -z[5]])
    nehari = Residual(float(np.sum(neh_terms)), float(np.sum(np.abs(neh_terms))))
    poh = _pohozaev_from_z(z, p)
    sv, rv, tv = z[2] / 2.0, z[4] / 2.0, z[3] / (2.0 * (p - 2.0))
    basis = np.array(
        [
            [3 * (p - 2), 6 - p, 0, 0, 0, 2 * p],
            [p - 2, -2 * (p - 3), 0, 2 * (p - 2), 0, p],
            [1, -1, 2, 0, 0, 0],
            [1, -1, 0, 0, 2, 0],
        ],
        dtype=float,
    )
    recon = np.array([theta / (p - 2.0), tv, sv, rv]) @ basis
    decomp = float(np.linalg.norm(recon - z) / max(np.linalg.norm(z), 1e-300))
    report = ZVectorReport(
        z=z,
        energy=float(theta),
        nehari=nehari,
        pohozaev=poh,
        t=float(tv),
        s=float(sv),
        r=float(rv),
        decomposition_residual=decomp,
        signed=float(-(p - 2.0) * (z[0] + z[1]) + (4.0 - p) * z[3]),
    )
    if max(nehari.relative, poh.relative) > 10.0 * tol:
        raise NotASolution(
            f"identity residuals {nehari.relative:.2e}, {poh.relative:.2e} exceed 10x{tol:g}"
        )
    return report


def classify_nontriviality(s: PairState, tol: float = 1e-6) -> str:
    """``"trivial"``, ``"semitrivial"`` or ``"vectorial"``."""
    g = s.grid
    nu = np.sqrt(max(g.inner(s.u, s.u), 0.0))
    nv = np.sqrt(max(g.inner(s.v, s.v), 0.0))
    total = np.hypot(nu, nv)
    if total == 0.0:
        return "trivial"
    zero_u, zero_v = nu < tol * total, nv < tol * total
    if zero_u and zero_v:
        return "trivial"
    if zero_u or zero_v:
        return "semitrivial"
    return "vectorial"


def solution_energy_lower_bound(s: PairState, P: ProblemParams) -> float:
    """``J(s) - d0 (p-2) / (2 (6-p)) int n``; nonnegative for solutions."""
    if P.d0 is None:
        raise ConfigError("d0 must be supplied with the potential family")
    p = P.p
    return energy(s, P).total - P.d0 * (p - 2.0) / (2.0 * (6.0 - p)) * s.mass()


def _check_grid(s: PairState, P: ProblemParams) -> None:
    if s.grid != P.grid:
        raise ConfigError("state and potentials live on different grids")
