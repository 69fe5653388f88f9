"""Closed-form constants and thresholds, each with an independent 1D oracle.

Every constant here is an explicit expression in ``p``, ``beta`` and a few
scalar summaries of the potentials.  Where the constant is the extremum of a
one-dimensional function, :class:`ThresholdReport` pairs the closed form with
a numerical minimisation of that function (log-spaced scan followed by a
golden-section refinement), so a transcription error in either shows up as
disagreement.
"""
from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field
from math import pi, sqrt
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from .errors import ConfigError, NotApplicable

__all__ = [
    "ThresholdReport",
    "scan_minimum",
    "g_beta",
    "argmax_g",
    "f_cd",
    "f_cd_constants",
    "f_cd_interval",
    "pointwise_min_constant",
    "nonexistence_threshold",
    "lambda_lower_bound",
    "coercive_upper",
    "l25_rhs",
    "l25_threshold_check",
    "m_beta",
    "sublevel_measure",
    "xbar",
    "filtration_level",
    "single_component_level",
    "alpha_infinity",
    "gamma_bound",
    "B0",
    "beta_hat",
    "beta_hat_lhs_rhs",
    "solution_mass_coefficient",
    "P_CLASSIFY",
    "constants_table",
    "constants_csv",
]

# Above this exponent the sign of the fibering second derivative at every
# solution is fixed regardless of beta; it is the positive root of
# 3p^2 - 2p - 24 = 0.
P_CLASSIFY = (1.0 + sqrt(73.0)) / 3.0

_HLS = 16.0 * 2.0 ** (1.0 / 3.0) / (3.0 * sqrt(3.0) * pi)


@dataclass(frozen=True)
class ThresholdReport:
    name: str
    value: float
    oracle_value: float
    inputs: dict = field(default_factory=dict)

    @property
    def agree(self) -> bool:
        return abs(self.value - self.oracle_value) < 1e-8 * (1.0 + abs(self.value))

    def as_row(self) -> dict:
        row = asdict(self)
        row["inputs"] = ";".join(f"{k}={v:g}" for k, v in self.inputs.items())
        row["agree"] = self.agree
        return row


def scan_minimum(
    fn: Callable[[float], float], lo: float = 1e-8, hi: float = 1e8, points: int = 4001
) -> tuple[float, float]:
    """Minimise ``fn`` over ``[lo, hi]``: log-spaced scan, then golden section.

    Returns ``(argmin, min)``.  The refinement runs in ``log s`` inside the
    bracket formed by the scan neighbours of the best sample.
    """
    xs = np.geomspace(lo, hi, points)
    vals = np.array([fn(x) for x in xs])
    i = int(np.argmin(vals))
    if i == 0 or i == points - 1:
        return float(xs[i]), float(vals[i])
    la, lb, lc = np.log(xs[i - 1]), np.log(xs[i]), np.log(xs[i + 1])
    res = optimize.minimize_scalar(
        lambda t: fn(float(np.exp(t))), bracket=(la, lb, lc), method="golden",
        options={"xtol": 1e-14},
    )
    x = float(np.exp(res.x))
    return x, float(fn(x))


def _dense_max(fn, xs: np.ndarray) -> float:
    """Maximum of ``fn`` by dense sampling on ``xs`` refined with a bounded search."""
    vals = fn(xs)
    i = int(np.argmax(vals))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    res = optimize.minimize_scalar(
        lambda s: -fn(s), bounds=(a, b), method="bounded", options={"xatol": 1e-15}
    )
    return max(float(vals[i]), float(-res.fun))


# ---------------------------------------------------------------------------
# coupling profile g(s)


def g_beta(s, beta: float, p: float):
    """``s^{p/2} + (1-s)^{p/2} + 2 beta s^{p/4} (1-s)^{p/4}`` on ``[0, 1]``."""
    s = np.asarray(s, dtype=float)
    out = s ** (p / 2) + (1 - s) ** (p / 2) + 2 * beta * (s * (1 - s)) ** (p / 4)
    return float(out) if out.ndim == 0 else out


def argmax_g(beta: float, p: float) -> float:
    """Maximiser of ``g`` in ``[0, 1/2]`` (``g`` is symmetric about 1/2).

    Exactly 1/2 once ``beta >= (p-2)/2``; otherwise located numerically.
    """
    if beta <= 0:
        raise ConfigError("argmax_g needs beta > 0")
    if beta >= (p - 2.0) / 2.0:
        return 0.5
    xs = np.linspace(0.0, 0.5, 20001)
    i = int(np.argmax(g_beta(xs, beta, p)))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    res = optimize.minimize_scalar(
        lambda s: -g_beta(s, beta, p), bounds=(a, b), method="bounded",
        options={"xatol": 1e-14},
    )
    return float(res.x)


# ---------------------------------------------------------------------------
# the auxiliary function f_{c,d}(s) = d/4 + c s / sqrt8 - (1+beta)/p s^{p-2}


def f_cd(s, c: float, d: float, beta: float, p: float):
    return d / 4.0 + c * np.asarray(s) / sqrt(8.0) - (1.0 + beta) / p * np.asarray(s) ** (p - 2.0)


def f_cd_constants(c: float, beta: float, p: float) -> tuple[float, float]:
    """``(d_c, s_c)``: the tangency level of ``d`` and the touching point."""
    if not 2.0 < p < 3.0:
        raise NotApplicable("f_{c,d} is only used for 2 < p < 3")
    s_c = (sqrt(8.0) * (1.0 + beta) * (p - 2.0) / (p * c)) ** (1.0 / (3.0 - p))
    d_c = (
        (3.0 - p)
        * (4.0 * (1.0 + beta) / p) ** (1.0 / (3.0 - p))
        * ((p - 2.0) / (sqrt(2.0) * c)) ** ((p - 2.0) / (3.0 - p))
    )
    return d_c, s_c


def f_cd_interval(c: float, d: float, beta: float, p: float) -> Optional[tuple[float, float]]:
    """Endpoints ``(eta_d, xi_d)`` of the set where ``f_{c,d} < 0``, if nonempty."""
    d_c, s_c = f_cd_constants(c, beta, p)
    if d >= d_c:
        return None
    f = lambda s: f_cd(s, c, d, beta, p)  # noqa: E731
    left = optimize.brentq(f, 0.0, s_c, xtol=1e-15)
    hi = 2.0 * s_c
    while f(hi) <= 0:
        hi *= 2.0
    right = optimize.brentq(f, s_c, hi, xtol=1e-15)
    return float(left), float(right)


# ---------------------------------------------------------------------------
# pointwise minimum constants and the thresholds built on them


def _min_quadratic_cubic(theta: float, k: float, p: float) -> float:
    """``min_{s>0} (theta s^2 + k s^3) / s^p`` in closed form."""
    return (theta / (3.0 - p)) ** (3.0 - p) * (k / (p - 2.0)) ** (p - 2.0)


def pointwise_min_constant(theta: float, k: float, p: float, variant: str = "lions") -> ThresholdReport:
    """Best constant in ``theta s^2 + c k s^3 >= d s^p`` for ``s >= 0``.

    ``lions``: ``c = sqrt2`` and the constant itself,
    ``2^{(p-2)/2} (theta/(3-p))^{3-p} (k/(p-2))^{p-2}``.
    ``appendix``: ``c = 1`` and the constant is reported times ``p``,
    ``p (theta/(3-p))^{3-p} (k/(p-2))^{p-2}``.
    """
    if not 2.0 < p < 3.0:
        raise NotApplicable("pointwise constants are defined for 2 < p < 3")
    if theta <= 0 or k <= 0:
        raise ConfigError("theta and k must be positive")
    if variant == "lions":
        value = 2.0 ** ((p - 2.0) / 2.0) * _min_quadratic_cubic(theta, k, p)
        quotient = lambda s: (theta * s * s + sqrt(2.0) * k * s**3) / s**p  # noqa: E731
    elif variant == "appendix":
        value = p * _min_quadratic_cubic(theta, k, p)
        quotient = lambda s: p * (theta * s * s + k * s**3) / s**p  # noqa: E731
    else:
        raise ConfigError(f"unknown variant {variant!r}")
    _, oracle = scan_minimum(quotient)
    return ThresholdReport(
        f"pointwise_min[{variant}]", value, oracle, {"theta": theta, "k": k, "p": p}
    )


def nonexistence_threshold(lam: float, rho_min: float, p: float) -> float:
    """Lower bound on the coupling below which no nontrivial solution exists."""
    if lam <= 0 or rho_min <= 0:
        return -1.0
    return pointwise_min_constant(lam, rho_min, p, "lions").value - 1.0


def lambda_lower_bound(theta: float, k: float, p: float) -> float:
    """Lower bound ``(p/2)(theta/(3-p))^{3-p}(k/(p-2))^{p-2} - 1`` on the
    quotient infimum with constant potentials ``theta`` and ``k``."""
    return 0.5 * p * _min_quadratic_cubic(theta, k, p) - 1.0


def coercive_upper(V_inf: float, rho_inf: float, p: float) -> float:
    """Right end of the coupling window in which the energy is coercive."""
    if not 2.0 < p < 3.0:
        raise NotApplicable("the coercive window is defined for 2 < p < 3")
    return p / 2.0 ** ((6.0 - p) / 2.0) * _min_quadratic_cubic(V_inf, rho_inf, p) - 1.0


def l25_rhs(beta: float, p: float) -> float:
    """``(2^{(6-p)/2}/p) (3-p)^{3-p} (p-2)^{p-2} (1+beta)``."""
    return 2.0 ** ((6.0 - p) / 2.0) / p * (3.0 - p) ** (3.0 - p) * (p - 2.0) ** (p - 2.0) * (1.0 + beta)


def l25_threshold_check(a: float, b: float, beta: float, p: float) -> bool:
    """True when ``a^{3-p} b^{p-2}`` reaches the positivity threshold."""
    if a <= 0 or b <= 0:
        raise ConfigError("a and b must be positive")
    return a ** (3.0 - p) * b ** (p - 2.0) >= l25_rhs(beta, p) * (1.0 - 1e-14)


def _m_profile(s, V, rho, beta, p):
    return 0.25 * V * s * s + rho * s**3 / sqrt(8.0) - (1.0 + beta) / p * s**p


def m_beta(V: float, rho: float, beta: float, p: float) -> float:
    """``inf_{s >= 0} (V s^2/4 + rho s^3/sqrt8 - (1+beta) s^p / p)``.

    The derivative is ``s k(s)`` with ``k`` convex, so the only candidate
    interior minimum is the larger root of ``k``; when ``k`` stays positive
    the infimum is 0, attained at ``s = 0``.
    """
    if V <= 0 or rho <= 0:
        raise ConfigError("V and rho must be positive")
    k = lambda s: 0.5 * V + 3.0 * rho / sqrt(8.0) * s - (1.0 + beta) * s ** (p - 2.0)  # noqa: E731
    s_star = ((1.0 + beta) * (p - 2.0) * sqrt(8.0) / (3.0 * rho)) ** (1.0 / (3.0 - p))
    if k(s_star) >= 0:
        return 0.0
    hi = 2.0 * s_star
    while k(hi) <= 0:
        hi *= 2.0
    s2 = optimize.brentq(k, s_star, hi, xtol=1e-15)
    return min(0.0, float(_m_profile(s2, V, rho, beta, p)))


def sublevel_measure(P, beta: Optional[float] = None) -> float:
    """Volume of the set where ``V^{3-p} rho^{p-2}`` is below the positivity
    threshold for ``P``'s exponent (and ``beta``, defaulting to ``P.beta``)."""
    beta = P.beta if beta is None else beta
    V = np.broadcast_to(np.asarray(P.V, dtype=float), P.grid.shape)
    rho = np.broadcast_to(np.asarray(P.rho, dtype=float), P.grid.shape)
    mask = V ** (3.0 - P.p) * rho ** (P.p - 2.0) < l25_rhs(beta, P.p)
    return P.grid.integrate(mask.astype(float))


# ---------------------------------------------------------------------------
# Nehari-level constants (2 < p < 4)


def xbar(lam: float, rho_max: float, p: float) -> float:
    """Squared-norm threshold separating the two low-energy Nehari pieces."""
    return 3.0 * sqrt(3.0) * pi * (p - 2.0) * lam**1.5 / (
        16.0 * 2.0 ** (1.0 / 3.0) * (4.0 - p) * rho_max**2
    )


def filtration_level(lam: float, rho_max: float, p: float) -> float:
    """Energy level below which the Nehari set splits by the norm threshold."""
    return 3.0 * sqrt(3.0) * pi * (p - 2.0) ** 2 * lam**1.5 / (
        64.0 * 2.0 ** (1.0 / 3.0) * p * (4.0 - p) * rho_max**2
    )


def single_component_level(S: float, p: float) -> float:
    """``(p-2)/(2p) S^{2p/(p-2)}``: energy floor of Nehari points with a zero component."""
    return (p - 2.0) / (2.0 * p) * S ** (2.0 * p / (p - 2.0))


def alpha_infinity(lam: float, V_max: float, S: float, beta: float, p: float) -> float:
    """Nehari level of the scalar limit problem with coefficient ``lam g(s_beta)/V_max``."""
    s_b = argmax_g(beta, p) if beta > 0 else 0.0
    g = g_beta(s_b, beta, p)
    return (p - 2.0) / (2.0 * p) * (V_max * S**p / (lam * g)) ** (2.0 / (p - 2.0))


def gamma_bound(beta: float, lam: float, V_max: float, rho_max: float, S: float, p: float) -> float:
    """Energy ceiling of the coupled ansatz on the lower Nehari branch."""
    X = V_max * S**p / (lam * (1.0 + beta))
    return 2.0 * V_max * (p - 2.0) / (p * lam) * X ** (2.0 / (p - 2.0)) + (
        _HLS * rho_max**2 * V_max / lam**2.5
    ) * (2.0 / (4.0 - p)) ** (4.0 / (p - 2.0)) * X ** (4.0 / (p - 2.0))


def B0(lam: float, V_max: float, rho_max: float, S: float, p: float) -> float:
    """Coupling beyond which the ansatz fibering map dips below zero."""
    return (
        2.0 * V_max * S**p / (lam * (4.0 - p) ** ((4.0 - p) / 2.0))
        * (2.0 * _HLS * rho_max**2 / lam**1.5) ** ((p - 2.0) / 2.0)
        * (lam / ((p - 2.0) * V_max)) ** ((p - 2.0) / 2.0)
        - 1.0
    )


def beta_hat_lhs_rhs(beta, lam, V_max, rho_max, d0, S, p) -> tuple[float, float]:
    """Both sides of ``A gamma(beta)^2 (4-p)^2 < 4p(p-2)``."""
    A = (_HLS * rho_max**2) ** 2 * (2.0 * (6.0 - p) / (d0 * (p - 2.0))) ** 3
    g = gamma_bound(beta, lam, V_max, rho_max, S, p)
    return A * g * g * (4.0 - p) ** 2, 4.0 * p * (p - 2.0)


def beta_hat(lam: float, V_max: float, rho_max: float, d0: float, S: float, p: float) -> float:
    """Smallest ``beta >= (p-2)/2`` for which every solution with energy
    below ``gamma(beta)`` lies on the lower fibering branch."""
    if p >= P_CLASSIFY:
        raise NotApplicable(f"p={p} >= {P_CLASSIFY:.5f}: the branch is fixed for every beta")
    holds = lambda b: np.less(*beta_hat_lhs_rhs(b, lam, V_max, rho_max, d0, S, p))  # noqa: E731
    lo = (p - 2.0) / 2.0
    if holds(lo):
        return lo
    hi = max(1.0, 2.0 * lo)
    while not holds(hi):
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise NotApplicable("condition never satisfied")
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return hi


def solution_mass_coefficient(d0: float, p: float) -> float:
    """``d0 (p-2) / (2 (6-p))``: energy per unit mass lower bound for solutions."""
    return d0 * (p - 2.0) / (2.0 * (6.0 - p))


# ---------------------------------------------------------------------------
# tabulation


def constants_table(p: float = 2.5, beta: float = 1.0, lam: float = 1.0, rho_min: float = 1.0) -> list[ThresholdReport]:
    """The constants web, each entry paired with its scan oracle."""
    out: list[ThresholdReport] = []
    d_rep = pointwise_min_constant(lam, rho_min, p, "lions")
    out.append(ThresholdReport("d_lions", d_rep.value, d_rep.oracle_value, d_rep.inputs))
    out.append(
        ThresholdReport(
            "nonexistence_bound", d_rep.value - 1.0, d_rep.oracle_value - 1.0, d_rep.inputs
        )
    )
    a_rep = pointwise_min_constant(lam, rho_min, p, "appendix")
    out.append(ThresholdReport("d_appendix", a_rep.value, a_rep.oracle_value, a_rep.inputs))
    out.append(
        ThresholdReport(
            "quotient_lower_bound",
            lambda_lower_bound(lam, rho_min, p),
            0.5 * a_rep.oracle_value - 1.0,
            a_rep.inputs,
        )
    )
    # coercive window end: the pointwise minimum of V s^2/4 + rho s^3/sqrt8
    # against s^p/p equals 1 + beta exactly at the threshold
    cu = coercive_upper(lam, rho_min, p)
    _, mmin = scan_minimum(lambda s: p * (0.25 * lam * s * s + rho_min * s**3 / sqrt(8.0)) / s**p)
    out.append(ThresholdReport("coercive_upper", cu, mmin - 1.0, {"V_inf": lam, "rho_inf": rho_min, "p": p}))
    d_c, s_c = f_cd_constants(1.0, beta, p)
    # f_{c,0} has its minimum at s_c with value -d_c/4.  A scan only locates
    # an argmin to about sqrt(machine eps), so s_c is checked as the root of
    # the derivative instead.
    dfc = lambda t: 1.0 / sqrt(8.0) - (1.0 + beta) * (p - 2.0) / p * np.exp(t * (p - 3.0))  # noqa: E731
    s_or = float(np.exp(optimize.brentq(dfc, -700.0, 700.0, xtol=1e-15)))
    _, f_or = scan_minimum(
        lambda s: float(f_cd(s, 1.0, 0.0, beta, p)), 1e-8, max(1e8, 100.0 * s_or)
    )
    out.append(ThresholdReport("s_c", s_c, s_or, {"c": 1.0, "beta": beta, "p": p}))
    out.append(ThresholdReport("d_c", d_c, -4.0 * f_or, {"c": 1.0, "beta": beta, "p": p}))
    xs = np.linspace(0.0, 1.0, 200001)
    if beta >= (p - 2.0) / 2.0:
        g_max = 2.0 ** (-(p - 2.0) / 2.0) * (1.0 + beta)
    else:
        g_max = g_beta(argmax_g(beta, p), beta, p)
    out.append(
        ThresholdReport(
            "g_max",
            g_max,
            _dense_max(lambda s: g_beta(s, beta, p), xs),
            {"beta": beta, "p": p},
        )
    )
    return out


def constants_csv(rows: list[ThresholdReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["name", "inputs", "value", "oracle_value", "agree"], lineterminator="\n")
    w.writeheader()
    for r in rows:
        row = r.as_row()
        row["value"] = repr(row["value"])
        row["oracle_value"] = repr(row["oracle_value"])
        w.writerow(row)
    return buf.getvalue()
