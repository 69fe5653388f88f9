"""Discrete function spaces: a cell-centered cubic box and a radial ray.

Both grids expose the same small protocol (``integrate``, ``inner``,
``neg_laplacian``, ``gradient_sq_integral``, ``resolvent``, ``radius``) so
that the energy, its variation and the solvers are written once and run on
either representation.

Cubic box
    Points ``x_i = -L + (i + 1/2) h`` with ``h = 2L/n``; derivatives are
    spectral on the periodic box, quadrature is the midpoint rule.

Radial ray
    Points ``r_i = (i + 1/2) dr`` on ``[0, R]``.  A radial profile ``w`` is
    handled through ``u = r w``, which is odd about the origin and vanishes
    at ``R``; the type-II discrete sine transform diagonalises ``-d^2/dr^2``
    for exactly this pair of boundary conditions, so radial derivatives are
    spectral too.  Quadrature is the midpoint rule with weight ``4 pi r^2 dr``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np
from scipy import fft

from .errors import ConfigError, NonPositivePotential

__all__ = [
    "GridSpec",
    "RadialGrid",
    "PairState",
    "Grid",
    "integrate",
    "gradient_sq_integral",
    "norm_V",
    "embed_radial",
    "radial_average",
    "boundary_mass",
]


@dataclass(frozen=True)
class GridSpec:
    """Cubic box ``[-L, L]^3`` with ``n`` cell-centered points per axis."""

    n: int
    L: float

    def __post_init__(self) -> None:
        if self.n < 8 or self.n % 2:
            raise ConfigError(f"grid needs an even n >= 8, got n={self.n}")
        if not self.L > 0:
            raise ConfigError(f"box half-width must be positive, got L={self.L}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n, self.n, self.n)

    @property
    def cell_volume(self) -> float:
        return self.h**3

    @cached_property
    def axis(self) -> np.ndarray:
        return -self.L + (np.arange(self.n) + 0.5) * self.h

    @cached_property
    def coords(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Broadcastable coordinate arrays (x, y, z)."""
        a = self.axis
        return a[:, None, None], a[None, :, None], a[None, None, :]

    @cached_property
    def radius(self) -> np.ndarray:
        x, y, z = self.coords
        return np.sqrt(x * x + y * y + z * z)

    @cached_property
    def _k2(self) -> np.ndarray:
        k = 2.0 * np.pi * fft.fftfreq(self.n, d=self.h)
        kr = 2.0 * np.pi * fft.rfftfreq(self.n, d=self.h)
        return k[:, None, None] ** 2 + k[None, :, None] ** 2 + kr[None, None, :] ** 2

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)

    def integrate(self, f: np.ndarray) -> float:
        return float(np.sum(f)) * self.cell_volume

    def inner(self, f: np.ndarray, g: np.ndarray) -> float:
        return float(np.vdot(f, g)) * self.cell_volume

    def neg_laplacian(self, f: np.ndarray) -> np.ndarray:
        return fft.irfftn(self._k2 * fft.rfftn(f), s=self.shape)

    def resolvent(self, f: np.ndarray, mu: float) -> np.ndarray:
        """Apply ``(-Laplacian + mu)^{-1}``."""
        return fft.irfftn(fft.rfftn(f) / (self._k2 + mu), s=self.shape)

    def gradient_sq_integral(self, f: np.ndarray) -> float:
        # Written as <f, -Lap f> so that the discrete energy and its
        # discrete gradient are exactly consistent.
        return max(self.inner(f, self.neg_laplacian(f)), 0.0)

    def outer_mask(self, frac: float = 0.8) -> np.ndarray:
        return self.radius > frac * self.L


@dataclass(frozen=True)
class RadialGrid:
    """Radial ray ``[0, R]`` with ``m`` midpoint nodes."""

    m: int = 4000
    R: float = 40.0

    def __post_init__(self) -> None:
        if self.m < 8:
            raise ConfigError(f"radial grid needs m >= 8, got m={self.m}")
        if not self.R > 0:
            raise ConfigError(f"radial cutoff must be positive, got R={self.R}")

    @property
    def dr(self) -> float:
        return self.R / self.m

    @property
    def shape(self) -> tuple[int]:
        return (self.m,)

    @cached_property
    def r(self) -> np.ndarray:
        return (np.arange(self.m) + 0.5) * self.dr

    @property
    def radius(self) -> np.ndarray:
        return self.r

    @cached_property
    def weights(self) -> np.ndarray:
        return 4.0 * np.pi * self.r**2 * self.dr

    @cached_property
    def _kappa2(self) -> np.ndarray:
        return (np.pi * (np.arange(self.m) + 1.0) / self.R) ** 2

    def zeros(self) -> np.ndarray:
        return np.zeros(self.m)

    def integrate(self, f: np.ndarray) -> float:
        return float(np.dot(self.weights, f))

    def inner(self, f: np.ndarray, g: np.ndarray) -> float:
        return float(np.dot(self.weights * f, g))

    def _sine(self, u: np.ndarray) -> np.ndarray:
        return fft.dst(u, type=2, norm="ortho")

    def _isine(self, c: np.ndarray) -> np.ndarray:
        return fft.idst(c, type=2, norm="ortho")

    def neg_laplacian(self, f: np.ndarray) -> np.ndarray:
        u = self.r * f
        return self._isine(self._kappa2 * self._sine(u)) / self.r

    def resolvent(self, f: np.ndarray, mu: float) -> np.ndarray:
        u = self.r * f
        return self._isine(self._sine(u) / (self._kappa2 + mu)) / self.r

    def gradient_sq_integral(self, f: np.ndarray) -> float:
        c = self._sine(self.r * f)
        return 4.0 * np.pi * self.dr * float(np.dot(self._kappa2, c * c))

    def outer_mask(self, frac: float = 0.8) -> np.ndarray:
        return self.r > frac * self.R


Grid = Union[GridSpec, RadialGrid]


@dataclass(frozen=True)
class PairState:
    """The vector unknown ``(u, v)`` sampled on one grid."""

    u: np.ndarray
    v: np.ndarray
    grid: Grid

    def __post_init__(self) -> None:
        if self.u.shape != self.grid.shape or self.v.shape != self.grid.shape:
            raise ConfigError("u and v must both match the grid shape")

    @classmethod
    def zeros(cls, grid: Grid) -> "PairState":
        return cls(grid.zeros(), grid.zeros(), grid)

    def scaled(self, t: float) -> "PairState":
        return PairState(t * self.u, t * self.v, self.grid)

    def axpy(self, a: float, other: "PairState") -> "PairState":
        """Return ``self + a * other``."""
        return PairState(self.u + a * other.u, self.v + a * other.v, self.grid)

    def swapped(self) -> "PairState":
        return PairState(self.v, self.u, self.grid)

    def clipped(self) -> "PairState":
        """Nonnegative parts of both components."""
        return PairState(np.maximum(self.u, 0.0), np.maximum(self.v, 0.0), self.grid)

    def dot(self, other: "PairState") -> float:
        return self.grid.inner(self.u, other.u) + self.grid.inner(self.v, other.v)

    def mass(self) -> float:
        """``integral (u^2 + v^2)``."""
        return self.dot(self)

    def l2(self) -> float:
        return float(np.sqrt(max(self.mass(), 0.0)))

    def is_zero(self) -> bool:
        return not (np.any(self.u) or np.any(self.v))

    def map(self, fn) -> "PairState":
        return PairState(fn(self.u), fn(self.v), self.grid)


def integrate(f: np.ndarray, grid: Grid) -> float:
    return grid.integrate(f)


def gradient_sq_integral(f: np.ndarray, grid: Grid) -> float:
    return grid.gradient_sq_integral(f)


def norm_V(s: PairState, V: np.ndarray | float) -> float:
    """Weighted norm ``(int |grad u|^2 + |grad v|^2 + V (u^2 + v^2))^{1/2}``."""
    V = np.broadcast_to(np.asarray(V, dtype=float), s.grid.shape)
    if np.min(V) <= 0:
        raise NonPositivePotential(f"potential must be positive, min is {np.min(V):.3g}")
    g = s.grid
    val = (
        g.gradient_sq_integral(s.u)
        + g.gradient_sq_integral(s.v)
        + g.integrate(V * (s.u**2 + s.v**2))
    )
    return float(np.sqrt(max(val, 0.0)))


def embed_radial(
    f: np.ndarray, rgrid: RadialGrid, center, grid: GridSpec
) -> np.ndarray:
    """Sample the radial profile ``f`` at ``|x - center|`` on a cubic grid.

    Linear interpolation in ``r``; zero beyond the radial cutoff.
    """
    c = np.asarray(center, dtype=float).reshape(3)
    x, y, z = grid.coords
    rr = np.sqrt((x - c[0]) ** 2 + (y - c[1]) ** 2 + (z - c[2]) ** 2)
    return np.interp(rr, rgrid.r, f, right=0.0)


def radial_average(f: np.ndarray, grid: GridSpec, rgrid: RadialGrid) -> np.ndarray:
    """Bin a cubic-grid field into radial shells (mean per shell, NaN if empty)."""
    idx = np.floor(grid.radius / rgrid.dr).astype(int).ravel()
    keep = idx < rgrid.m
    sums = np.bincount(idx[keep], weights=f.ravel()[keep], minlength=rgrid.m)
    counts = np.bincount(idx[keep], minlength=rgrid.m)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)


def boundary_mass(s: PairState, frac: float = 0.8) -> float:
    """``integral over |x| > frac * L of (u^2 + v^2)``: box-truncation diagnostic."""
    mask = s.grid.outer_mask(frac)
    return s.grid.integrate(np.where(mask, s.u**2 + s.v**2, 0.0))
