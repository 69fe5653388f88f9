"""Closed-form constants and the shape of the energy along a ray.

Run with ``python3 demos/01_constants_and_fibering.py``.
"""
import numpy as np

from coupled_hartree import bounds
from coupled_hartree.fibering import coefficients, find_roots, project_to_nehari, classify
from coupled_hartree.functional import ProblemParams, energy
from coupled_hartree.grid import RadialGrid
from coupled_hartree.reference import gaussian_pair

# Every constant is printed next to an independent scan of the same quantity.
print(bounds.constants_csv(bounds.constants_table(p=2.5, beta=1.0)))

# Along the ray t -> (t u, t v) the energy is A t^2/2 + B t^4/4 - C t^p/p.
# For 2 < p < 4 and strong coupling the ray crosses the Nehari set twice:
# first at a local maximum (lower branch), then at a local minimum.
ray = RadialGrid(1000, 30.0)
P = ProblemParams.constant(ray, p=3.5, beta=10.0, V=1.0, rho=0.1)
s = gaussian_pair(ray, 1.0, 1.5, 1.0, 1.5)
c = coefficients(s, P)
roots = find_roots(c)
print(f"A={c.A:.4g}  B={c.B:.4g}  C={c.C:.4g}")
print(f"t_minus={roots.t_minus:.4f}  t_dip={roots.t_dip:.4f}  t_plus={roots.t_plus:.4f}")

for t in np.geomspace(0.1, 2 * roots.t_plus, 12):
    print(f"  t={t:9.4f}   J(t u, t v)={c.phi(t):12.5g}")

x = project_to_nehari(s, P, "minus")
print("projected pair:", classify(x, P).value, "energy", energy(x, P).total)
