from __future__ import annotations

import numpy as np
import pytest

from scarmps.core import ring
from scarmps.models import Model1Params, model1_density, model1_tensors
from scarmps.mps1d import build_pbc
from scarmps.multiplet import (
    b_over_a_series,
    collinearity,
    expand_multiplet,
    model1_series_mps,
    momentum_residual,
    rank_of,
    rydberg_mask,
    rydberg_projector,
    series_pbc_state,
    vn_formula,
)
from scarmps.verifier import global_zero_check


def test_b_over_a_series_matches_closed_form():
    ds = 0.7 - 0.4j
    s = b_over_a_series(ds, 6)
    for t in (0.01, 0.05):
        a = 1 / t
        assert abs(s.evaluate(t) - 1 / (1 - a * ds)) < 10 * t**7


def test_series_mps_matches_numeric_tensor():
    D = (1.0, 0.5, -0.8)
    smps = model1_series_mps(1, D, 8)
    t = 0.02
    A, _ = model1_tensors(Model1Params(1, D, a=1 / t))
    assert np.allclose(smps.evaluate(t), A, atol=1e-12)


def test_series_truncation_order():
    D = (1.0, 1.0, 1.0)
    n, order = 6, 3
    smps = model1_series_mps(1, D, order)
    coeffs = series_pbc_state(smps, n)
    errs = []
    ts = np.array([0.01, 0.03, 0.1])
    for t in ts:
        A, _ = model1_tensors(Model1Params(1, D, a=1 / t))
        errs.append(np.linalg.norm(coeffs.evaluate(t) - build_pbc(A, n)))
    slope = np.polyfit(np.log(ts), np.log(errs), 1)[0]
    assert abs(slope - (order + 1)) < 0.2


def test_rydberg_mask_counts():
    # ring configurations with no two adjacent excitations: Lucas numbers
    assert rydberg_projector(6).rank == 18
    assert rydberg_projector(8).rank == 47
    m = rydberg_mask(4, two_s=2)
    assert m.shape == (81,)
    assert m[0]


@pytest.mark.parametrize("n", [6, 8])
def test_multiplet_states_are_zero_energy_scars(n):
    D = (0.9, -0.4, 1.3)
    basis = expand_multiplet(1, D, n)
    assert basis.rank == n // 2 + 1
    h = model1_density(Model1Params(1, D))
    proj = rydberg_projector(n)
    for v in basis.vectors:
        assert global_zero_check(h, ring(n), v).zero_residual <= 1e-8
        assert momentum_residual(v, 2, n) <= 1e-10
        assert proj.leakage(v) <= 1e-10


def test_spin1_multiplet():
    D = (1.0, 0.3, 0.8)
    n = 4
    basis = expand_multiplet(2, D, n)
    h = model1_density(Model1Params(2, D))
    for v in basis.vectors:
        assert global_zero_check(h, ring(n), v).zero_residual <= 1e-8


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_vn_formula_collinear_at_n8(k):
    D = (1.2, 0.7, -0.6)
    p = Model1Params(1, D)
    basis = expand_multiplet(1, D, 8)
    assert collinearity(basis.vectors[k], vn_formula(8, p.delta, k)) >= 1 - 1e-9


def test_expand_multiplet_preconditions():
    with pytest.raises(ValueError):
        expand_multiplet(1, (1, 1, 1), 7)
    with pytest.raises(ValueError):
        expand_multiplet(1, (1, 1, 1), 6, n_max=4)
    with pytest.raises(ValueError):
        vn_formula(6, 1.0, 6)


def test_rank_and_collinearity_helpers():
    v = np.array([1.0, 2.0, 0.0])
    assert rank_of([v, 2 * v]) == 1
    assert collinearity(v, -3j * v) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        collinearity(v, np.zeros(3))
