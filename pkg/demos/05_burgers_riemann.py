"""
Inviscid Burgers Riemann problems
=================================

Shock, rarefaction, and transonic rarefaction on [-6, 6] with Dirichlet
boundaries, integrated to T=5 with the local Lax-Friedrichs flux.  The exact
solutions (traveling shock at the Rankine-Hugoniot speed, self-similar fans)
provide the error reference.
"""

import numpy as np

from wenonet import solver as sv
from wenonet.reconstruct import Weno3JS, Weno3Z, Weno5JS

cases = [
    ("shock (1 -> 0)", sv.burgers_riemann(1.0, 0.0)),
    ("rarefaction (0 -> 1)", sv.burgers_riemann(0.0, 1.0)),
    ("transonic rarefaction (-1 -> 1)", sv.burgers_riemann(-1.0, 1.0)),
]

for label, prob in cases:
    grid = sv.default_grid(prob, 256)
    print(f"{label}, nx=256, T=5:")
    for scheme in (Weno3JS(), Weno3Z(), Weno5JS()):
        report = sv.run(prob, grid, scheme)
        u = report.final_state
        overshoot = max(
            float(u.max() - max(prob.riemann)), float(min(prob.riemann) - u.min())
        )
        print(f"  {scheme.name:10s} L1 {report.final_error:.3e}  "
              f"overshoot {overshoot:+.1e}  TV {sv.total_variation(u):.4f}")
    print()

# Where the shock actually sits after five time units: x = t * (u_l + u_r) / 2.
prob = sv.burgers_riemann(1.0, 0.0)
grid = sv.default_grid(prob, 256)
u = sv.run(prob, grid, Weno3JS()).final_state
crossing = grid.centers[np.argmin(np.abs(u - 0.5))]
print(f"shock position: computed {crossing:.3f}, exact 2.5")
