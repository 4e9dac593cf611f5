from __future__ import annotations

import numpy as np
import pytest

from scarmps.core import torus
from scarmps.models import Spin2TwoDParams, XyzDmParams, spin2_2d_model, xyz_dm_2d_model
from scarmps.peps2d import (
    build_torus_state,
    energy_expectation,
    frustration_free_check,
    schmidt_rank,
    schmidt_values,
    transpose_legs,
)
from scarmps.verifier import global_zero_check


def _loop_torus(A, lx, ly):
    d = A.shape[0]
    n = lx * ly
    out = np.zeros(d**n, complex)
    for k, conf in enumerate(np.ndindex(*(d,) * n)):
        total = 0
        for bonds in np.ndindex(*(2,) * (2 * n)):
            bx, by = bonds[:n], bonds[n:]
            amp = 1
            for y in range(ly):
                for x in range(lx):
                    v = y * lx + x
                    left = y * lx + (x - 1) % lx
                    down = ((y - 1) % ly) * lx + x
                    amp *= A[conf[v], bx[left], bx[v], by[down], by[v]]
            total += amp
        out[k] = total
    return out


def test_torus_contraction_matches_loop_oracle():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((2, 2, 2, 2, 2)) + 1j * rng.standard_normal((2, 2, 2, 2, 2))
    assert np.allclose(build_torus_state(A, 2, 2), _loop_torus(A, 2, 2))


def test_build_torus_guards():
    A = np.ones((5, 2, 2, 2, 2))
    with pytest.raises(MemoryError):
        build_torus_state(A, 4, 4)
    with pytest.raises(ValueError):
        build_torus_state(np.ones((2, 2, 2, 2, 2)), 3, 2, require_even=True)


def test_transpose_swaps_torus_axes():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((2, 2, 2, 2, 2))
    a = build_torus_state(A, 3, 2).reshape((2,) * 6)
    # site (x, y) of the first is site (y, x) of the second
    perm = [0, 2, 4, 1, 3, 5]
    b = build_torus_state(transpose_legs(A), 2, 3).reshape((2,) * 6)
    assert np.allclose(a, b.transpose(perm))


@pytest.mark.parametrize("shape", [(2, 2), (2, 3), (3, 2)])
def test_spin2_global_zero(shape):
    h, A, _ = spin2_2d_model(Spin2TwoDParams(0.8 + 0.3j, 1.2, (1, 2, 0.5, 1.5, 0.7), 0.9))
    psi = build_torus_state(A, *shape)
    assert global_zero_check(h, torus(*shape), psi).zero_residual <= 1e-9


def test_xyz_schmidt_rank_and_ground_space():
    h, A, _ = xyz_dm_2d_model(XyzDmParams(1, 2, 3, 0.6))
    psi = build_torus_state(A, 2, 4)
    for k in range(1, 8):
        assert schmidt_rank(schmidt_values(psi, list(range(k)), 3, 8)) <= 2
    assert abs(energy_expectation(h, psi, 2, 4)) < 1e-9
    with pytest.raises(ValueError):
        schmidt_values(psi, [], 3, 8)


def test_frustration_free_limits():
    h, A, _ = xyz_dm_2d_model(XyzDmParams(1, 2, 3, 0.0))
    assert all(r.relative <= 1e-10 for r in frustration_free_check(h, A).values())
