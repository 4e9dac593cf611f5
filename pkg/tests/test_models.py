from __future__ import annotations

import numpy as np
import pytest

from scarmps.core import spin_operators
from scarmps.models import (
    Model1Params,
    Model2Params,
    ParameterDomainError,
    Spin2TwoDParams,
    XyzDmParams,
    dm_term,
    get_entry,
    model1_density,
    model1_series_parts,
    model1_tensors,
    model2_density,
    model2_tensors,
    params_from_dict,
    params_to_dict,
    spin2_2d_model,
    spin2_link_states,
    spin_flip,
    xyz_dm_2d_model,
)
from scarmps.verifier import bond_product

X = np.array([[0, 1], [1, 0]], complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2)


def test_model1_diagonal_examples():
    h = model1_density(Model1Params(1, (0.7, -1.1, 0.4))).matrix
    assert h[0, 0] == 0  # up up
    assert np.isclose(h[3, 3], 4)  # down down


def _pauli_dm(D):
    dx, dy, dz = D
    return dx * (np.kron(Y, Z) - np.kron(Z, Y)) + dy * (np.kron(Z, X) - np.kron(X, Z)) + dz * (np.kron(X, Y) - np.kron(Y, X))


def test_dm_term_pauli_oracle_x_only():
    # D = (1, 0, 0) is outside the Model I domain, so check the DM piece alone
    assert np.allclose(4 * dm_term((1, 0, 0), spin_operators(1)), _pauli_dm((1, 0, 0)))


@pytest.mark.parametrize("D", [(1, 0, 0.5), (0.4, -1.3, 0.8)])
def test_model1_density_pauli_oracle(D):
    # S = sigma / 2, so 4 D.(S x S') = D.(sigma x sigma')
    want = np.kron(I2 - Z, I2 - Z) + _pauli_dm(D)
    h = model1_density(Model1Params(1, D))
    assert np.allclose(h.matrix, want)
    assert h.is_hermitian()


def test_model1_derived_constants():
    p = Model1Params(1, (1, 1, 1), a=1)
    assert np.isclose(p.delta, 1 - 1j)
    assert np.isclose(p.b, -1j)
    assert np.isclose(p.alpha, -(1 + 1j))
    assert p.beta == 2


@pytest.mark.parametrize("D", [(0, 1, 1), (1, 1, 0)])
def test_model1_domain_errors(D):
    with pytest.raises(ParameterDomainError, match="parameter domain"):
        Model1Params(1, D)


def test_model1_tensor_structure():
    A, E = model1_tensors(Model1Params(1, (1, 1, 1), a=1.3 + 0.2j))
    assert A[0, 0, 1] == 0
    assert E is not None
    A1, A2, A0 = model1_series_parts(1)
    for x, y in [(A1, A2), (A2, A1), (A0, A0)]:
        assert np.allclose(bond_product(x, y), 0)
    assert model1_tensors(Model1Params(3, (1, 1, 1)))[1] is None
    with pytest.raises(ParameterDomainError):
        model1_tensors(Model1Params(5, (1, 1, 1)))


def test_model2_field_only_oracle():
    ops = spin_operators(2)
    h = model2_density(Model2Params(0, 0, 1)).matrix
    # each onsite 2 S^y is split evenly over the two bonds of a site
    assert np.allclose(h, np.kron(ops.sy, np.eye(3)) + np.kron(np.eye(3), ops.sy))


def test_model2_tensors():
    A, E = model2_tensors(Model2Params(0.3, 0.5, 0.0))
    assert np.allclose(A[1], X)
    assert np.allclose(E, 0)
    _, E = model2_tensors(Model2Params(0.3, 0.5, 0.7))
    assert np.isclose(E[0, 1, 0], 0.7j / np.sqrt(2))
    assert model2_density(Model2Params(0.3, 0.5, 0.7)).is_hermitian()


def test_spin2_link_states_are_sz_eigenstates():
    sz = spin_operators(4).sz
    tot = np.kron(sz, np.eye(5)) + np.kron(np.eye(5), sz)
    for q, v in spin2_link_states(1.3 + 0.4j, 0.7).items():
        assert np.allclose(tot @ v, q * v)
        w = spin_flip(v)
        assert np.allclose(tot @ w, -q * w)


def test_spin2_model_examples():
    h, A, E = spin2_2d_model(Spin2TwoDParams(1, 1, (1,) * 5, 0.0))
    assert all(np.allclose(e, 0) for e in E.slots.values())
    w = np.linalg.eigvalsh(h.matrix)
    assert abs(w.min()) < 1e-12
    a = 0.8 - 0.3j
    _, _, E = spin2_2d_model(Spin2TwoDParams(a, 1.1, (1,) * 5, 0.5))
    assert np.isclose(get_entry(E.slots["E1"], 1, (2, 2), (2, 1)), 5 * a * 0.5)
    assert np.allclose(E.signed_sum(), 0)


def test_xyz_constants_and_limits():
    p = XyzDmParams(1, 2, 3, 0.0, 1)
    assert np.isclose(p.hz, np.sqrt(20))
    assert p.c == 6
    # (jx + jy + 2 jz - 2 hz) / (jx - jy) with jx + jy + 2 jz = 9
    assert np.isclose(p.z_plus, 2 * np.sqrt(20) - 9)
    h, _, E = xyz_dm_2d_model(p)
    assert all(np.allclose(e, 0) for e in E.slots.values())
    assert h.is_hermitian()
    with pytest.raises(ParameterDomainError):
        XyzDmParams(1, 1, 3, 0.5)


@pytest.mark.parametrize(
    "model,p",
    [
        ("model1", Model1Params(2, (1, -0.5, 0.3), a=1 + 2j)),
        ("model2", Model2Params(0.1, 0.2, 0.3)),
        ("spin2_2d", Spin2TwoDParams(1j, 2, (1, 2, 3, 4, 5), 0.1)),
        ("xyz_dm_2d", XyzDmParams(1, 2, 3, 0.4, -1)),
    ],
)
def test_params_round_trip(model, p):
    assert params_from_dict(model, params_to_dict(p)) == p


def test_params_unknown_key():
    with pytest.raises(KeyError):
        params_from_dict("model2", {"jx": 1})
