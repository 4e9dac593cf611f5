from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scarmps.core import spin_operators, translate
from scarmps.models import Model1Params, Model2Params, model1_tensors, model2_tensors
from scarmps.mps1d import (
    BoundaryVectors,
    brute_force_correlator,
    build_obc,
    build_pbc,
    connected_correlator,
    correlation_length,
    correlator_csv,
    correlator_scan,
    expectation,
    transfer_matrix,
    transfer_spectrum,
)


def _loop_pbc(A, n):
    d = A.shape[0]
    out = np.zeros(d**n, complex)
    for k, conf in enumerate(np.ndindex(*(d,) * n)):
        M = np.eye(A.shape[1])
        for s in conf:
            M = M @ A[s]
        out[k] = np.trace(M)
    return out


def test_pbc_matches_loop_oracle():
    A, _ = model1_tensors(Model1Params(1, (0.5, 1, -0.7), a=1.2 - 0.3j))
    assert np.allclose(build_pbc(A, 5), _loop_pbc(A, 5))


def test_model2_two_site_amplitudes():
    A, _ = model2_tensors()
    psi = build_pbc(A, 2).reshape(3, 3)
    assert np.isclose(psi[2, 2], 2)  # |-1,-1>
    assert np.isclose(psi[1, 1], 2)  # |0,0>


@given(st.integers(2, 6))
@settings(max_examples=5, deadline=None)
def test_pbc_is_translation_invariant(n):
    A, _ = model1_tensors(Model1Params(1, (1, 1, 1), a=0.8j))
    psi = build_pbc(A, n)
    assert np.allclose(translate(psi, 2, n), psi)


def test_obc_boundaries():
    A, _ = model1_tensors(Model1Params(1, (1, 0, 1)))
    bv = BoundaryVectors(np.array([1, -1j]), np.array([1, 1j]))
    psi = build_obc(A, bv, 4)
    assert psi.shape == (16,)
    with pytest.raises(ValueError):
        BoundaryVectors(np.zeros(2), np.ones(2))


def test_amplitude_cap():
    A, _ = model2_tensors()
    with pytest.raises(MemoryError):
        build_pbc(A, 10, cap=1000)


def test_model2_transfer_spectrum_oracle():
    A, _ = model2_tensors()
    e11 = np.diag([1.0, 0.0])
    e22 = np.diag([0.0, 1.0])
    sx = np.array([[0, 1], [1, 0]])
    direct = 2 * np.kron(e11, e11) + np.kron(sx, sx) + 2 * np.kron(e22, e22)
    want = np.sort(np.linalg.eigvalsh(direct))
    got = np.sort(transfer_spectrum(A).real)
    assert np.allclose(got, want, atol=1e-12)
    assert np.allclose(want, [-1, 1, 1, 3])
    cl = correlation_length(A)
    assert np.isclose(cl.ratio, 1 / 3)
    assert np.isclose(cl.xi, 1 / np.log(3))
    assert np.isclose(cl.xi_log_convention, np.log(3))


def test_transfer_matrix_gauge_invariant_spectrum():
    A, _ = model1_tensors(Model1Params(1, (1, 1, 1), a=1.5))
    G = np.array([[2.0, 1j], [0.3, 1.0]])
    At = np.einsum("ab,sbc,cd->sad", G, A, np.linalg.inv(G))
    s1 = np.sort_complex(transfer_spectrum(A))
    s2 = np.sort_complex(transfer_spectrum(At))
    assert np.allclose(s1, s2, atol=1e-10)


@pytest.mark.parametrize("n,r", [(6, 1), (6, 3), (7, 2)])
def test_connected_correlator_matches_brute_force(n, r):
    A, _ = model1_tensors(Model1Params(1, (0.4, 1.2, -0.9), a=1.1 + 0.4j))
    ops = spin_operators(1)
    psi = build_pbc(A, n)
    for O in (ops.sx, ops.sz):
        want = brute_force_correlator(psi, O, O, r, 2, n)
        assert np.isclose(connected_correlator(A, O, O, r, n), want, atol=1e-12)
    assert np.isclose(expectation(A, ops.sz, n), np.vdot(psi, np.kron(ops.sz, np.eye(2 ** (n - 1))) @ psi) / np.vdot(psi, psi))


def test_model1_decay_tracks_transfer_ratio():
    # parameters with a well separated subleading mode; when several modes
    # share nearly the same modulus their interference hides a single rate
    A, _ = model1_tensors(Model1Params(1, (1.5, 0.3, 0.5), a=2j))
    sz = spin_operators(1).sz
    n = 10
    psi = build_pbc(A, n)
    c = [abs(brute_force_correlator(psi, sz, sz, r, 2, n)) for r in (2, 3, 4)]
    rho = correlation_length(A).ratio
    ring_form = [rho**r + rho ** (n - r) for r in (2, 3, 4)]
    for k in range(2):
        measured = c[k + 1] / c[k]
        expected = ring_form[k + 1] / ring_form[k]
        assert abs(measured / expected - 1) < 0.1


def test_correlator_scan_and_csv():
    A, _ = model2_tensors()
    sz = spin_operators(2).sz
    rows = correlator_scan(A, sz, sz, 12, 6)
    mags = [abs(c) for _, _, c in rows]
    assert all(x > y for x, y in zip(mags, mags[1:]))
    text = correlator_csv(rows)
    assert text.splitlines()[0] == "r,re,im,connected_re,connected_im"
    assert len(text.splitlines()) == 7
    with pytest.raises(ValueError):
        connected_correlator(A, sz, sz, 0, 12)


def test_transfer_matrix_with_operator():
    A, _ = model2_tensors()
    assert np.allclose(transfer_matrix(A, np.eye(3)), transfer_matrix(A))
