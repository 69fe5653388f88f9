"""Minimising over the lower Nehari branch for p = 3.5 and strong coupling.

The energy is unbounded below for p > 3, so the ground state is sought on
the set of pairs where the ray derivative vanishes, restricted to the branch
of local maxima.  The printout compares the level with the same problem when
the potential well is removed.
"""
from coupled_hartree.experiments import run_limit_comparison, run_nehari_ground_state

res = run_nehari_ground_state(n=32)
v = res.values
print(f"level {v['alpha_minus']:.6f} ({v['classification']}, {v['filtration']})")
print(f"ceilings: filtration {v['filtration_level']:.4f}, single component {v['single_component_level']:.4f}")
print(f"floor: {v['sandwich_lower']:.4f}")
print(f"identity residuals: Nehari {v['nehari']:.1e}, Pohozaev {v['pohozaev']:.1e}")

lim = run_limit_comparison(n=32)
print(f"with the well {lim.values['alpha_minus']:.6f} < without {lim.values['alpha_minus_limit']:.6f}")
for name, ok in {**res.checks, **lim.checks}.items():
    print(f"  {name:45s} {'ok' if ok else 'FAILED'}")
