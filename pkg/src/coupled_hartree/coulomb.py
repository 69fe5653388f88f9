"""Newtonian potential of the weighted charge and the inequalities it obeys.

For a pair ``(u, v)`` and a positive weight ``rho`` the charge is
``q = rho (u^2 + v^2)`` and the potential is

    phi(x) = integral q(y) / |x - y| dy,

with the weight inside the integral.  The quartic energy term then reads
``integral rho phi (u^2 + v^2) = integral q phi``, a symmetric quadratic form in
``q``.  Note the kernel carries no ``1/(4 pi)``: ``-Laplacian phi = 4 pi q``.

Two discretisations are provided:

* cubic box: free-space convolution on a zero-padded ``2n`` box with the
  kernel sampled in real space; the origin cell uses the exact cell average
  of ``1/|x|``.
* radial ray: the shell formula ``phi(r) = (4 pi / r) int_0^r s^2 q + 4 pi
  int_r^R s q`` evaluated as a symmetric matrix ``1/max(r_i, r_j)`` with
  cumulative sums and an exact self-cell weight.

Both operators are symmetric, so the discrete energy ``<q, phi[q]>`` has the
discrete gradient ``2 phi[q]`` exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import log, pi, sqrt

import numpy as np
from scipy import fft

from .errors import ConfigError, NonPositivePotential
from .grid import Grid, GridSpec, PairState, RadialGrid

__all__ = [
    "CELL_AVERAGE_INV_R",
    "CoulombResult",
    "potential",
    "solve_coulomb_3d",
    "solve_coulomb_radial",
    "coulomb_energy",
    "SPLITTING_VARIANTS",
    "check_splitting_inequality",
    "hls_constant",
    "check_hls_bound",
    "hls_intermediate_margin",
    "potential_at",
]

# Average of 1/|x| over the unit cube centred at the origin,
# int_{[-1/2,1/2]^3} dx/|x| = 3 ln(2 + sqrt 3) - pi/2.  A cell of side h
# therefore carries the kernel value CELL_AVERAGE_INV_R / h.
CELL_AVERAGE_INV_R = 3.0 * log(2.0 + sqrt(3.0)) - pi / 2.0


@dataclass(frozen=True)
class CoulombResult:
    phi: np.ndarray
    energy: float


@lru_cache(maxsize=8)
def _kernel_hat(n: int, h: float) -> np.ndarray:
    """Transform of the zero-padded ``1/|x|`` kernel, times the cell volume."""
    m = 2 * n
    d = np.arange(m)
    d = np.where(d <= n, d, d - m).astype(float) * h
    r = np.sqrt(d[:, None, None] ** 2 + d[None, :, None] ** 2 + d[None, None, :] ** 2)
    with np.errstate(divide="ignore"):
        k = 1.0 / r
    k[0, 0, 0] = CELL_AVERAGE_INV_R / h
    return fft.rfftn(k * h**3)


def _potential_cubic(q: np.ndarray, grid: GridSpec) -> np.ndarray:
    n = grid.n
    khat = _kernel_hat(n, grid.h)
    qhat = fft.rfftn(q, s=(2 * n, 2 * n, 2 * n))
    return fft.irfftn(qhat * khat, s=(2 * n, 2 * n, 2 * n))[:n, :n, :n]


@lru_cache(maxsize=8)
def _self_weight(m: int, R: float) -> np.ndarray:
    dr = R / m
    r = (np.arange(m) + 0.5) * dr
    a, b = r - 0.5 * dr, r + 0.5 * dr
    return 4.0 * pi * ((r**3 - a**3) / (3.0 * r) + 0.5 * (b**2 - r**2))


def _potential_radial(q: np.ndarray, grid: RadialGrid) -> np.ndarray:
    r, w = grid.r, grid.weights
    wq = w * q
    inner = np.concatenate(([0.0], np.cumsum(wq)[:-1]))
    tail = wq / r
    outer = np.concatenate((np.cumsum(tail[::-1])[::-1][1:], [0.0]))
    return inner / r + outer + _self_weight(grid.m, grid.R) * q


def potential(q: np.ndarray, grid: Grid) -> np.ndarray:
    """Potential ``int q(y)/|x-y| dy`` of a charge sampled on ``grid``."""
    if isinstance(grid, GridSpec):
        return _potential_cubic(q, grid)
    if isinstance(grid, RadialGrid):
        return _potential_radial(q, grid)
    raise ConfigError(f"unsupported grid type {type(grid).__name__}")


def _weight_field(rho, grid: Grid) -> np.ndarray:
    rho = np.broadcast_to(np.asarray(rho, dtype=float), grid.shape)
    if np.min(rho) <= 0:
        raise NonPositivePotential(f"charge weight must be positive, min is {np.min(rho):.3g}")
    return rho


def solve_coulomb_3d(s: PairState, rho) -> CoulombResult:
    """Potential and energy ``int rho phi (u^2+v^2)`` for a pair on any grid."""
    rho = _weight_field(rho, s.grid)
    q = rho * (s.u**2 + s.v**2)
    phi = potential(q, s.grid)
    return CoulombResult(phi=phi, energy=s.grid.inner(q, phi))


def solve_coulomb_radial(q: np.ndarray, grid: RadialGrid) -> np.ndarray:
    if np.min(q) < 0:
        raise ConfigError("radial Coulomb oracle expects a nonnegative charge")
    return _potential_radial(q, grid)


def coulomb_energy(q: np.ndarray, grid: Grid) -> float:
    """``int q phi[q]``, a nonnegative quadratic form in the charge."""
    return grid.inner(q, potential(q, grid))


# Lions-type splitting  c int q |u| <= a int |grad u|^2 + b int q phi[q],
# with q = weight (u^2 + v^2).  Cauchy-Schwarz applied to
# 4 pi int q |u| = int grad phi . grad |u| shows the family is valid whenever
# c^2 <= 16 pi a b; each named variant satisfies this with room to spare.
SPLITTING_VARIANTS: dict[str, tuple[float, float, float]] = {
    # sqrt2 k int(|u|^3 + v^2|u|) <= int|grad u|^2 + (k/2) int phi_k (u^2+v^2)
    "lions": (sqrt(2.0), 1.0, 0.5),
    # (1/sqrt8) int rho(|u|^3 + v^2|u|) <= (1/4) int|grad u|^2 + (1/8) int rho phi (u^2+v^2)
    "coercive": (1.0 / sqrt(8.0), 0.25, 0.125),
    # (k/2) int(|u|^3 + v^2|u|) <= (1/2) int|grad u|^2 + (k/8) int phi_k (u^2+v^2)
    "appendix": (0.5, 0.5, 0.125),
}


def check_splitting_inequality(
    s: PairState, weight, variant: str = "lions", component: str = "u"
) -> tuple[float, float]:
    """Evaluate both sides of a splitting inequality; returns ``(lhs, rhs)``.

    ``weight`` is either a positive constant ``k`` or a positive field ``rho``.
    ``component`` selects which field carries the gradient (the ``v`` form is
    the mirror inequality).
    """
    if variant not in SPLITTING_VARIANTS:
        raise ConfigError(f"unknown splitting variant {variant!r}")
    c, a, b = SPLITTING_VARIANTS[variant]
    g = s.grid
    w = _weight_field(weight, g)
    f = s.u if component == "u" else s.v
    q = w * (s.u**2 + s.v**2)
    lhs = c * g.integrate(q * np.abs(f))
    rhs = a * g.gradient_sq_integral(f) + b * coulomb_energy(q, g)
    return lhs, rhs


def hls_constant(rho_max: float, lam: float = 1.0) -> float:
    """Constant ``16 2^{1/3} rho_max^2 / (3 sqrt3 pi lam^{3/2})`` of the quartic bound."""
    return 16.0 * 2.0 ** (1.0 / 3.0) * rho_max**2 / (3.0 * sqrt(3.0) * pi * lam**1.5)


def check_hls_bound(s: PairState, rho, rho_max: float, lam: float) -> float:
    """Margin ``C ||(u,v)||_lam^4 - int rho phi (u^2+v^2)``, nonnegative in theory.

    The norm uses the constant weight ``lam``; any admissible potential
    ``V >= lam`` only increases the right-hand side.
    """
    g = s.grid
    rho = _weight_field(rho, g)
    if np.max(rho) > rho_max * (1.0 + 1e-12):
        raise ConfigError("rho_max must bound the sampled weight")
    norm2 = (
        g.gradient_sq_integral(s.u) + g.gradient_sq_integral(s.v) + lam * s.mass()
    )
    return hls_constant(rho_max, lam) * norm2**2 - solve_coulomb_3d(s, rho).energy


def hls_intermediate_margin(s: PairState, rho, rho_max: float) -> float:
    """Margin of the sharper form ``C0 (int u^2+v^2)^{3/2} (int |grad|^2)^{1/2}``."""
    g = s.grid
    grad = g.gradient_sq_integral(s.u) + g.gradient_sq_integral(s.v)
    return hls_constant(rho_max, 1.0) * s.mass() ** 1.5 * sqrt(grad) - solve_coulomb_3d(
        s, rho
    ).energy


def potential_at(q: np.ndarray, grid: GridSpec, point=(0.0, 0.0, 0.0)) -> float:
    """Evaluate ``int q(y)/|point - y| dy`` by direct quadrature on the box.

    Cell-centered grids have no node at a cell vertex such as the origin, so
    the potential there is not a sample of the convolution.  Cells within one
    spacing of ``point`` use the exact average of ``1/|x|`` over a cube with a
    vertex at the singularity (half the centred-cell constant); all other
    cells use the midpoint value.
    """
    x, y, z = grid.coords
    c = np.asarray(point, dtype=float).reshape(3)
    d = np.sqrt((x - c[0]) ** 2 + (y - c[1]) ** 2 + (z - c[2]) ** 2)
    h = grid.h
    with np.errstate(divide="ignore"):
        w = h**3 / d
    w = np.where(d < h, 0.5 * CELL_AVERAGE_INV_R * h**2, w)
    return float(np.sum(q * w))
