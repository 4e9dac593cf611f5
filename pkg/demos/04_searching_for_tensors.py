"""
Looking for (A, E) numerically
==============================

Given only the Hamiltonian density, search for tensors satisfying the link
equation with damped least squares from random starts.
"""

from __future__ import annotations

import numpy as np

from scarmps.core import ring
from scarmps.models import Model1Params, model1_density
from scarmps.mps1d import build_pbc
from scarmps.solver import SolveOptions, equivalence_probe, solve_dehp_1d
from scarmps.verifier import global_zero_check

h = model1_density(Model1Params(1, (1.0, 1.0, 1.0)))
results = solve_dehp_1d(h, SolveOptions(chi=2, multistarts=12, seed=3, record_trace=True))

for r in results[:5]:
    print(f"start {r.start:2d}: residual {r.residual:.1e} after {r.iterations} steps, "
          f"nondegenerate={r.nondegenerate}")

best = results[0]
print("trace of the best run:", " ".join(f"{x:.0e}" for x in best.trace[::3]))
for n in (4, 6, 8):
    g = global_zero_check(h, ring(n), build_pbc(best.A, n))
    print(f"  N={n}: ||H psi|| / ||psi|| = {g.zero_residual:.1e}")

# distinct starts often land on different members of the family of solutions
verdicts = [equivalence_probe(best, r) for r in results[1:6] if r.nondegenerate]
print("compared with the next starts:", verdicts)
np.set_printoptions(precision=3, suppress=True)
print(best.A)
