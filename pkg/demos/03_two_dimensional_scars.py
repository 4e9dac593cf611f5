"""
Scars on small tori
===================

Two square-lattice models whose PEPS obey a four-slot error algebra. The slots
cancel at every node, so the local errors sum to zero on any torus.
"""

from __future__ import annotations

import numpy as np

from scarmps.core import torus
from scarmps.models import Spin2TwoDParams, XyzDmParams, spin2_2d_model, xyz_dm_2d_model
from scarmps.peps2d import build_torus_state, frustration_free_check, schmidt_rank, schmidt_values
from scarmps.verifier import convention_search, global_zero_check

# spin-2 projector model with a uniform field
h, A, E = spin2_2d_model(Spin2TwoDParams(a=0.8 + 0.3j, b=1.2, lam=(1, 0.7, 1.9, 0.4, 1.3), hz=1.0))
ff = frustration_free_check(h, A)
print("spin-2: h (A o A) alone leaves", {k: f"{v.relative:.2f}" for k, v in ff.items()})
found = convention_search(h, A, E)
print("error slots per bond end:", found.convention.as_dict())
for shape in [(2, 2), (2, 3), (3, 3)]:
    g = global_zero_check(h, torus(*shape), build_torus_state(A, *shape))
    print(f"  {shape[0]}x{shape[1]} torus: ||H psi|| / ||psi|| = {g.zero_residual:.1e}")

# spin-1 XYZ with an in-plane DM term; the state is a sum of two product states
p = XyzDmParams(jx=1, jy=2, jz=3, dxy=0.5)
h, A, E = xyz_dm_2d_model(p)
print(f"\nXYZ+DM: h_z = {p.hz:.4f}, z_+ = {p.z_plus:.4f}")
psi = build_torus_state(A, 2, 4)
print("  2x4 residual:", f"{global_zero_check(h, torus(2, 4), psi).zero_residual:.1e}")
ranks = [schmidt_rank(schmidt_values(psi, list(range(k)), 3, 8)) for k in range(1, 8)]
print("  Schmidt ranks across row-major cuts:", ranks)
print("  norm of the two-product state:", np.linalg.norm(psi))
