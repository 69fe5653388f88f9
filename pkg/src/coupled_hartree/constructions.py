"""Analytic potentials and the test pairs built from them.

Potentials
    :class:`WellProfile` is a radial profile ``f(r) = f_inf - depth * S(r)``
    with ``S`` a sum of shells ``exp(-((r - r_i) / w)^q)`` for an even ``q``.  A shell
    at ``r_i = 0`` is a central well; ``r_i > 0`` gives an annular well.  The
    profile knows its infimum, supremum, limit at infinity and the field
    ``x . grad f = r f'(r)``, so problems built from it carry exact inputs for
    the Pohozaev-type audits.

Test pairs
    ``coupled_ansatz`` splits one scalar field between the two components,
    ``cutoff`` localises a pair with a smooth radial plateau function, and
    ``build_multibump`` places translated copies of a localised pair along a
    line and records how the energy splits into self and interaction parts.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from .coulomb import potential
from .errors import BoxTooSmall, ConfigError, ZeroState
from .functional import EnergyBreakdown, ProblemParams, energy
from .grid import Grid, GridSpec, PairState, RadialGrid

__all__ = [
    "WellProfile",
    "constant_profile",
    "problem_from_profiles",
    "scale_potentials",
    "coupled_ansatz",
    "smoothstep_cutoff",
    "cutoff",
    "shift_cells",
    "MultibumpSpec",
    "MultibumpLedger",
    "build_multibump",
    "multibump_ledger",
    "center_of_mass",
]


@dataclass(frozen=True)
class WellProfile:
    """Radial profile ``f_inf - depth * sum_i exp(-((r - r_i) / width)^q)``.

    ``q = 2`` gives Gaussian wells; larger even ``q`` flattens the bottom of
    each well, which keeps a localised bump inside the region where the
    profile sits at its minimum.
    """

    f_inf: float
    depth: float = 0.0
    width: float = 1.0
    radii: tuple[float, ...] = (0.0,)
    q: int = 2

    def __post_init__(self) -> None:
        if self.width <= 0:
            raise ConfigError("well width must be positive")
        if self.q < 2 or self.q % 2:
            raise ConfigError("the well exponent q must be an even integer >= 2")
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))

    def _shells(self, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        S = np.zeros_like(r, dtype=float)
        dS = np.zeros_like(r, dtype=float)
        q = self.q
        for ri in self.radii:
            y = (r - ri) / self.width
            e = np.exp(-(y**q))
            S = S + e
            dS = dS - q * y ** (q - 1) / self.width * e
        return S, dS

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return self.f_inf - self.depth * self._shells(r)[0]

    def x_grad(self, r) -> np.ndarray:
        """``x . grad f = r f'(r)``."""
        r = np.asarray(r, dtype=float)
        return -self.depth * r * self._shells(r)[1]

    def scaled(self, eps: float) -> "WellProfile":
        """The profile of ``x -> f(eps x)``."""
        if eps <= 0:
            raise ConfigError("eps must be positive")
        return WellProfile(
            self.f_inf, self.depth, self.width / eps, tuple(r / eps for r in self.radii), self.q
        )

    def _extent(self) -> float:
        return max(self.radii) + 8.0 * self.width

    def _extremum(self, sign: float) -> float:
        # dense sampling plus a bounded refinement around the best sample
        r = np.linspace(0.0, self._extent(), 20001)
        vals = sign * self(r)
        i = int(np.argmin(vals))
        a, b = r[max(i - 1, 0)], r[min(i + 1, len(r) - 1)]
        res = optimize.minimize_scalar(lambda t: sign * float(self(t)), bounds=(a, b),
                                       method="bounded", options={"xatol": 1e-12})
        best = min(float(vals[i]), float(res.fun), sign * self.f_inf)
        return sign * best

    @property
    def inf(self) -> float:
        return self._extremum(1.0)

    @property
    def sup(self) -> float:
        return self._extremum(-1.0)

    def d0(self) -> float:
        """``inf_x (2 f + x . grad f)``, the constant of the virial-type lower bound."""
        r = np.linspace(0.0, self._extent(), 40001)
        return float(min(np.min(2.0 * self(r) + self.x_grad(r)), 2.0 * self.f_inf))

    def argmin_radius(self) -> float:
        r = np.linspace(0.0, self._extent(), 20001)
        return float(r[int(np.argmin(self(r)))])


def constant_profile(value: float) -> WellProfile:
    return WellProfile(float(value), 0.0)


def problem_from_profiles(
    grid: Grid, p: float, beta: float, V: WellProfile, rho: WellProfile
) -> ProblemParams:
    """Sample two radial profiles on ``grid`` with exact scalar summaries."""
    r = grid.radius
    return ProblemParams(
        p=p,
        beta=beta,
        V=V(r),
        rho=rho(r),
        grid=grid,
        x_grad_V=V.x_grad(r),
        x_grad_rho=rho.x_grad(r),
        lam=V.inf,
        V_max=V.sup,
        V_inf=V.f_inf,
        rho_min=rho.inf,
        rho_max=rho.sup,
        rho_inf=rho.f_inf,
        d0=V.d0(),
        profiles=(V, rho),
    )


def scale_potentials(P: ProblemParams, eps: float) -> ProblemParams:
    """Replace ``V, rho`` by ``V(eps x), rho(eps x)`` (analytic profiles only)."""
    if P.profiles is None:
        raise ConfigError("scaling needs the analytic profiles behind the problem")
    V, rho = P.profiles
    return problem_from_profiles(P.grid, P.p, P.beta, V.scaled(eps), rho.scaled(eps))


def coupled_ansatz(z: np.ndarray, s: float, grid: Grid) -> PairState:
    """``(sqrt(s) z, sqrt(1 - s) z)``."""
    if not 0.0 <= s <= 1.0:
        raise ConfigError("the split parameter must lie in [0, 1]")
    if not np.any(z):
        raise ZeroState("the ansatz needs a nonzero field")
    return PairState(sqrt(s) * z, sqrt(1.0 - s) * z, grid)


def smoothstep_cutoff(r: np.ndarray, R: float) -> np.ndarray:
    """Radial plateau: 1 for ``r <= R/2``, 0 for ``r >= R``, quintic in between.

    The quintic smoothstep has slope at most ``15/8`` per unit of its
    argument, so ``|grad psi| <= 3.75 / R``.
    """
    if R <= 0:
        raise ConfigError("cutoff radius must be positive")
    t = np.clip((np.asarray(r, dtype=float) - 0.5 * R) / (0.5 * R), 0.0, 1.0)
    return 1.0 - t**3 * (10.0 - 15.0 * t + 6.0 * t * t)


def cutoff(s: PairState, R: float, center=(0.0, 0.0, 0.0)) -> PairState:
    """Multiply both components by the plateau function centred at ``center``."""
    g = s.grid
    if isinstance(g, RadialGrid):
        r = g.r
    else:
        x, y, z = g.coords
        c = np.asarray(center, dtype=float)
        r = np.sqrt((x - c[0]) ** 2 + (y - c[1]) ** 2 + (z - c[2]) ** 2)
    psi = smoothstep_cutoff(r, R)
    return PairState(s.u * psi, s.v * psi, g)


def shift_cells(f: np.ndarray, cells: Sequence[int]) -> np.ndarray:
    """Translate a cubic-grid field by whole cells (no wrap-around allowed)."""
    cells = tuple(int(c) for c in cells)
    support = np.nonzero(f)
    for axis, c in enumerate(cells):
        if support[axis].size and (
            support[axis].min() + c < 0 or support[axis].max() + c >= f.shape[axis]
        ):
            raise BoxTooSmall(f"shift {cells} moves the support out of the box")
    return np.roll(f, cells, axis=(0, 1, 2))


@dataclass(frozen=True)
class MultibumpSpec:
    """``N`` copies of a localised pair spaced ``spacing`` apart along ``e``.

    ``spacing`` defaults to ``N^3``; desk-sized boxes usually need an
    override.  ``x0`` and ``eps_N`` place the arrangement around
    ``x0 / eps_N``; with the default ``x0 = 0`` the row is centred on the
    origin.
    """

    N: int
    R0: float
    e: tuple[float, float, float] = (1.0, 0.0, 0.0)
    x0: tuple[float, float, float] = (0.0, 0.0, 0.0)
    eps_N: Optional[float] = None
    spacing: Optional[float] = None

    def __post_init__(self) -> None:
        if self.N < 1:
            raise ConfigError("need at least one bump")
        if self.R0 <= 0:
            raise ConfigError("cutoff radius must be positive")
        e = np.asarray(self.e, dtype=float)
        if not np.isclose(np.linalg.norm(e), 1.0):
            raise ConfigError("direction must be a unit vector")
        if self.eps_N is not None and not 0 < self.eps_N < 1.0 / (self.N**4 + self.R0):
            raise ConfigError("eps_N must lie in (0, 1/(N^4 + R0))")
        if self.gap <= 2.0 * self.R0 and self.N > 1:
            raise ConfigError("bump supports overlap: spacing must exceed 2 R0")

    @property
    def gap(self) -> float:
        return float(self.spacing if self.spacing is not None else self.N**3)

    def centers(self) -> np.ndarray:
        e = np.asarray(self.e, dtype=float)
        base = np.asarray(self.x0, dtype=float) / (self.eps_N or 1.0)
        offsets = (np.arange(self.N) - 0.5 * (self.N - 1)) * self.gap
        return base[None, :] + offsets[:, None] * e[None, :]


@dataclass(frozen=True)
class MultibumpLedger:
    single: EnergyBreakdown
    total: EnergyBreakdown
    N: int
    self_coulomb: float
    cross_coulomb: float
    point_charge: float
    charges: tuple[float, ...]
    distances: tuple[float, ...] = field(default_factory=tuple)

    @property
    def additive_residual(self) -> float:
        """Largest relative mismatch of the local terms against ``N x single``."""
        worst = 0.0
        for name in ("kinetic", "external", "power", "cross"):
            a, b = getattr(self.total, name), self.N * getattr(self.single, name)
            worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
        return worst


def build_multibump(pair: PairState, spec: MultibumpSpec) -> tuple[PairState, np.ndarray]:
    """Sum of ``N`` whole-cell translates of ``pair`` (assumed centred at the
    origin and supported in the ball of radius ``R0``).

    Returns the pair and the realised centres (rounded to the grid).
    """
    g = pair.grid
    if not isinstance(g, GridSpec):
        raise ConfigError("multibump configurations live on the cubic grid")
    centers = spec.centers()
    reach = np.max(np.abs(centers), axis=0) + spec.R0
    if np.any(reach >= g.L):
        raise BoxTooSmall(f"bumps reach {reach.max():.3g} but the box half-width is {g.L:.3g}")
    cells = np.rint(centers / g.h).astype(int)
    u = g.zeros()
    v = g.zeros()
    for c in cells:
        u = u + shift_cells(pair.u, c)
        v = v + shift_cells(pair.v, c)
    return PairState(u, v, g), cells * g.h


def multibump_ledger(
    pair: PairState, spec: MultibumpSpec, P: ProblemParams
) -> tuple[PairState, MultibumpLedger]:
    """Build the configuration and split its energy into self and cross parts.

    The point-charge estimate of the interaction is ``1/2 sum_{i<j} Q_i Q_j /
    d_ij`` with ``Q = int rho (u^2 + v^2)`` over each bump.
    """
    multi, centers = build_multibump(pair, spec)
    g = pair.grid
    single = energy(pair, P)
    total = energy(multi, P)
    cells = np.rint(centers / g.h).astype(int)
    charges = []
    self_c = 0.0
    for c in cells:
        bu, bv = shift_cells(pair.u, c), shift_cells(pair.v, c)
        q = P.rho * (bu**2 + bv**2)
        charges.append(g.integrate(q))
        self_c += 0.25 * g.inner(q, potential(q, g))
    pc = 0.0
    dists = []
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            d = float(np.linalg.norm(centers[i] - centers[j]))
            dists.append(d)
            pc += 0.5 * charges[i] * charges[j] / d
    ledger = MultibumpLedger(
        single=single,
        total=total,
        N=spec.N,
        self_coulomb=self_c,
        cross_coulomb=total.coulomb - self_c,
        point_charge=pc,
        charges=tuple(charges),
        distances=tuple(dists),
    )
    return multi, ledger


def center_of_mass(s: PairState) -> np.ndarray:
    """Centroid of the density ``u^2 + v^2`` on the cubic grid."""
    g = s.grid
    if not isinstance(g, GridSpec):
        raise ConfigError("the centroid is only meaningful on the cubic grid")
    n = s.u**2 + s.v**2
    m = g.integrate(n)
    if not m > 0:
        raise ZeroState("the zero pair has no centroid")
    x, y, z = g.coords
    return np.array([g.integrate(n * x), g.integrate(n * y), g.integrate(n * z)]) / m
