from __future__ import annotations

import numpy as np
import pytest

from scarmps.core import ring
from scarmps.ed import (
    DENSE_CAP,
    ObcSetup,
    assemble,
    eigenvalue_csv,
    momentum_filter,
    obc_scar_check,
    zero_space,
)
from scarmps.models import Model1Params, Model2Params, ParameterDomainError, model1_density, model2_density


def test_dense_and_matrix_free_agree():
    h = model2_density(Model2Params(0.3, 0.2, 0.9))
    H = assemble(h, ring(4))
    op = assemble(h, ring(4), dense=False)
    v = np.random.default_rng(0).standard_normal(81)
    assert np.allclose(H @ v, op.matvec(v))
    assert np.allclose(H, H.conj().T)


def test_dense_cap():
    h = model2_density(Model2Params())
    with pytest.raises(MemoryError):
        assemble(h, ring(10), dense=True)
    assert 3**9 <= DENSE_CAP


def test_zero_space_on_known_spectrum():
    H = np.diag([0.0, 0.0, 1.0, -2.0])
    rep = zero_space(H)
    assert rep.zero_count == 2
    assert rep.certified
    assert rep.gap == 1.0
    with pytest.raises(ValueError):
        zero_space(np.array([[0, 1], [0, 0]]))


def test_model1_zero_count_n6():
    h = model1_density(Model1Params(1, (0.8, -0.5, 1.1)))
    rep = zero_space(assemble(h, ring(6)))
    assert rep.certified
    assert rep.zero_count == 5
    counts = momentum_filter(list(rep.zero_vectors.T), 6, 2)
    assert counts[0] == 4
    assert sum(counts.values()) == 5


def test_model2_unique_zero_state():
    h = model2_density(Model2Params(0.37, -0.81, 0.52))
    rep = zero_space(assemble(h, ring(4)))
    assert rep.zero_count == 1 and rep.certified


def test_momentum_filter_rejects_non_invariant_span():
    v = np.zeros(16)
    v[1] = 1
    with pytest.raises(ValueError):
        momentum_filter([v], 4, 2)


def test_obc_formulas_example():
    s = ObcSetup((1, 0, 1), hz1=0.3, hxN=0.7)
    assert np.isclose(s.energy, 1.0)
    assert s.h1 == (0.0, 1.0, 0.3)
    with pytest.raises(ParameterDomainError):
        ObcSetup((0, 1, 1))


@pytest.mark.parametrize("D", [(1, 0, 1), (1, 1, 1), (0.7, -1.2, 0.5)])
def test_obc_scar(D):
    res = obc_scar_check(ObcSetup(D, 0.4, -0.6), 6)
    assert res["residual"] <= 1e-9
    assert np.isclose(res["energy_measured"], res["energy_predicted"])
    assert res["multiplicity"] == 1


def test_eigenvalue_csv():
    text = eigenvalue_csv(np.array([0.5, -1.0]))
    assert text.splitlines() == ["index,value", "0,0.5", "1,-1.0"]
