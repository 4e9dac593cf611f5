from __future__ import annotations

import json

import numpy as np
import pytest

from scarmps.core import ring
from scarmps.models import LocalTerm, Model1Params, model1_density, model1_tensors
from scarmps.mps1d import build_pbc
from scarmps.solver import (
    SolveOptions,
    SolveResult,
    equivalence_probe,
    jacobian,
    residual_vector,
    result_to_json,
    solve_dehp_1d,
)
from scarmps.verifier import check_link_1d, global_zero_check

H1 = model1_density(Model1Params(1, (1, 1, 1)))


def test_jacobian_matches_finite_differences():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((2, 2, 2)) + 1j * rng.standard_normal((2, 2, 2))
    E = rng.standard_normal((2, 2, 2)) + 1j * rng.standard_normal((2, 2, 2))
    J = jacobian(H1.matrix, A, E)
    dx = 1e-7 * (rng.standard_normal(16) + 1j * rng.standard_normal(16))
    r0 = residual_vector(H1.matrix, A, E)
    r1 = residual_vector(H1.matrix, A + dx[:8].reshape(2, 2, 2), E + dx[8:].reshape(2, 2, 2))
    lin = J @ dx
    # residual is bilinear, so the remainder is second order in dx
    assert np.linalg.norm(r1 - r0 - lin) <= 1e-5 * np.linalg.norm(lin)


def test_discovers_model1_solution():
    res = solve_dehp_1d(H1, SolveOptions(chi=2, multistarts=8, seed=7, record_trace=True))
    best = res[0]
    assert best.residual <= 1e-8 and best.converged and best.nondegenerate
    assert abs(best.residual - check_link_1d(H1, best.A, best.E).relative) <= 1e-13
    for n in (4, 6):
        g = global_zero_check(H1, ring(n), build_pbc(best.A, n))
        assert g.zero_residual <= 1e-7
    for r in res:
        assert r.monotone
        assert all(x >= y for x, y in zip(r.trace, r.trace[1:]))
    assert [r.residual for r in res] == sorted(r.residual for r in res)


def test_deterministic_under_seed():
    opts = SolveOptions(chi=2, multistarts=3, seed=11, max_iterations=40)
    a = solve_dehp_1d(H1, opts)
    b = solve_dehp_1d(H1, opts)
    assert [(r.start, r.iterations, r.residual) for r in a] == [(r.start, r.iterations, r.residual) for r in b]


def test_zero_density_solved_at_iteration_zero():
    h0 = LocalTerm(2, np.zeros((4, 4), complex), "zero")
    res = solve_dehp_1d(h0, SolveOptions(chi=2, multistarts=2, zero_E_init=True))
    assert all(r.residual == 0 and r.iterations == 0 for r in res)


def test_identity_density_has_no_scalar_solution():
    h = LocalTerm(2, np.eye(4, dtype=complex), "identity")
    res = solve_dehp_1d(h, SolveOptions(chi=1, multistarts=3, max_iterations=50))
    assert res[0].residual > 0.1
    assert not res[0].converged


def test_mask_is_respected():
    mask = np.ones((2, 2, 2), bool)
    mask[:, 0, 1] = False
    res = solve_dehp_1d(H1, SolveOptions(chi=2, multistarts=2, max_iterations=20, mask_A=mask))
    assert all(np.all(r.A[:, 0, 1] == 0) for r in res)


def test_options_validation():
    with pytest.raises(ValueError):
        SolveOptions(residual_target=0)
    with pytest.raises(ValueError):
        SolveOptions(multistarts=0)


def _as_result(A, E):
    return SolveResult(A, E, 0.0, 0.0, 0, 0, True, True, True)


def test_equivalence_probe():
    p = Model1Params(1, (1, 1, 1), a=1.7)
    A, E = model1_tensors(p)
    G = np.array([[1.0, 0.5j], [0.2, 1.5]])
    At = np.einsum("ab,sbc,cd->sad", G, A, np.linalg.inv(G))
    assert equivalence_probe(_as_result(A, E), _as_result(At, E)) == "same-state"
    assert equivalence_probe(_as_result(A, E), _as_result(A, E + 0.3 * A)) == "same-state"
    A2, E2 = model1_tensors(p.with_a(0.6 + 0.9j))
    assert equivalence_probe(_as_result(A, E), _as_result(A2, E2)) == "different"
    nil = np.zeros((2, 2, 2), complex)
    nil[0, 0, 1] = 1
    with pytest.raises(ValueError):
        equivalence_probe(_as_result(nil, nil), _as_result(A, E))


def test_json_uses_re_im_pairs():
    opts = SolveOptions(chi=2, multistarts=1, max_iterations=5)
    res = solve_dehp_1d(H1, opts)
    doc = json.loads(result_to_json(res, opts, include_trace=True))
    A = np.array(doc["results"][0]["A"])
    assert A.shape == (2, 2, 2, 2)
    assert np.allclose(A[..., 0] + 1j * A[..., 1], res[0].A)
    assert doc["options"]["damping_up"] == 3.0
