"""Exception types raised by the library.

Each error carries a short machine-readable ``code`` so the command line
front end can map failures onto exit statuses without string matching.
"""
from __future__ import annotations


class HartreeError(Exception):
    """Base class for every library error."""

    code = "error"


class ConfigError(HartreeError):
    code = "config"


class NonPositivePotential(HartreeError):
    """A potential field that must be strictly positive is not."""

    code = "guard"


class GuardViolation(HartreeError):
    """Parameters fall outside the regime an experiment is meant for."""

    code = "guard"


class ZeroState(HartreeError):
    """An operation that needs a nonzero pair received (0, 0)."""

    code = "state"


class MissingGradientFields(HartreeError):
    """A Pohozaev-type audit needs the fields x.grad V and x.grad rho."""

    code = "state"


class NotASolution(HartreeError):
    """Solution-only audits were requested on a state that is not critical."""

    code = "convergence"


class NoPositivePower(HartreeError):
    """The p-homogeneous coefficient vanishes, so no ray meets the Nehari set."""

    code = "state"


class RootAbsent(HartreeError):
    """The requested fibering root does not exist for this direction."""

    code = "state"


class NoConvergence(HartreeError):
    code = "convergence"


class BoxTooSmall(HartreeError):
    code = "config"


class NotApplicable(HartreeError):
    """A threshold was requested outside the exponent range where it is used."""

    code = "guard"


class Diverged(HartreeError):
    """Descent drove the energy below the divergence sentinel."""

    code = "convergence"
