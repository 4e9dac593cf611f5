"""
The tower hidden in the 1/a expansion
=====================================

Expanding the state in t = 1/a gives one zero-energy state per order. Compare
them with states built from generalized lowering operators acting on all-up.
"""

from __future__ import annotations

import numpy as np

from scarmps.core import ring
from scarmps.models import Model1Params, model1_density
from scarmps.multiplet import collinearity, expand_multiplet, rydberg_projector, vn_formula
from scarmps.verifier import global_zero_check

D = (1.1, -0.7, 0.9)
p = Model1Params(1, D)
h = model1_density(p)
n = 10

basis = expand_multiplet(1, D, n)
print(f"N={n}: {len(basis.vectors)} coefficients, rank {basis.rank}")
proj = rydberg_projector(n)
print(f"Rydberg subspace has {proj.rank} of {2 ** n} configurations")

for k, v in enumerate(basis.vectors):
    res = global_zero_check(h, ring(n), v).zero_residual
    line = f"  v_{k}: |H v| = {res:.1e}, leakage {proj.leakage(v):.1e}"
    if 1 <= k <= 5:
        line += f", overlap with closed form {collinearity(v, vn_formula(n, p.delta, k)):.12f}"
    print(line)

# the Gram matrix shows how far from orthogonal the tower is
np.set_printoptions(precision=3, suppress=True)
print(np.abs(basis.gram))
