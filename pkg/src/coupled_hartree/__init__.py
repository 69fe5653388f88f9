"""Numerics for a two-component Schrodinger system with a weighted Hartree term.

The package evaluates the energy of pairs ``(u, v)`` on a cubic box or a
radial ray, finds its critical points by monotone descent, and checks the
closed-form constants, inequalities and energy identities that govern
existence, nonexistence and symmetry of ground states.
"""
from .errors import HartreeError
from .grid import GridSpec, PairState, RadialGrid
from .functional import ProblemParams, energy, first_variation
from .minimize import SolverConfig, descend, nehari_minimize, radial_descend
from .experiments import EXPERIMENTS, ExperimentResult

__version__ = "0.1.0"

__all__ = [
    "HartreeError",
    "GridSpec",
    "PairState",
    "RadialGrid",
    "ProblemParams",
    "energy",
    "first_variation",
    "SolverConfig",
    "descend",
    "nehari_minimize",
    "radial_descend",
    "EXPERIMENTS",
    "ExperimentResult",
]
