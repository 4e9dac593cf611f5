"""Explicit 1D matrix product states, transfer matrices and correlators."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MAX_AMPLITUDES",
    "BoundaryVectors",
    "CorrelationLength",
    "build_pbc",
    "build_obc",
    "transfer_matrix",
    "transfer_spectrum",
    "correlation_length",
    "expectation",
    "connected_correlator",
    "brute_force_correlator",
    "correlator_scan",
    "correlator_csv",
]

MAX_AMPLITUDES = 10**8


@dataclass(frozen=True)
class BoundaryVectors:
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        B = np.asarray(self.B, dtype=complex)
        C = np.asarray(self.C, dtype=complex)
        if not B.any() or not C.any():
            raise ValueError("boundary vectors must be nonzero")
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)


def _check_cap(d: int, n: int, cap: int) -> None:
    if d**n > cap:
        raise MemoryError(f"{d}^{n} amplitudes exceed the cap of {cap}")


def _chain_products(A: np.ndarray, n: int) -> np.ndarray:
    """All products A^{s_1} ... A^{s_n}, shape (d^n, chi, chi), site 1 slowest."""
    d, chi, _ = A.shape
    M = A.copy()
    for _ in range(n - 1):
        M = np.einsum("kab,sbc->ksac", M, A).reshape(-1, chi, chi)
    return M


def build_pbc(A: np.ndarray, n: int, cap: int = MAX_AMPLITUDES) -> np.ndarray:
    """Periodic MPS with amplitudes Tr(A^{s_1} ... A^{s_n})."""
    A = np.asarray(A, dtype=complex)
    _check_cap(A.shape[0], n, cap)
    return np.einsum("kaa->k", _chain_products(A, n))


def build_obc(A: np.ndarray, bv: BoundaryVectors, n: int, cap: int = MAX_AMPLITUDES) -> np.ndarray:
    """Open MPS with amplitudes B A^{s_1} ... A^{s_n} C."""
    A = np.asarray(A, dtype=complex)
    _check_cap(A.shape[0], n, cap)
    return np.einsum("a,kab,b->k", bv.B, _chain_products(A, n), bv.C)


def transfer_matrix(A: np.ndarray, O: np.ndarray | None = None) -> np.ndarray:
    """sum_{s,s'} O_{s's} A^s (x) conj(A^{s'}); O defaults to the identity."""
    A = np.asarray(A, dtype=complex)
    d, chi, _ = A.shape
    if O is None:
        O = np.eye(d)
    T = np.einsum("ts,sab,tcd->acbd", O, A, A.conj())
    return T.reshape(chi * chi, chi * chi)


def transfer_spectrum(A: np.ndarray) -> np.ndarray:
    ev = np.linalg.eigvals(transfer_matrix(A))
    # stable order: modulus descending, then real part descending
    order = np.lexsort((-ev.real, -np.round(np.abs(ev), 12)))
    return ev[order]


@dataclass(frozen=True)
class CorrelationLength:
    xi: float  # inf when |l2| == |l1|, 0 when l2 == 0
    ratio: float  # |l2 / l1|
    phase: float  # arg(l2 / l1); nonzero means oscillating decay
    leading: complex
    subleading: complex

    @property
    def xi_log_convention(self) -> float:
        """ln|l1 / l2|, i.e. the inverse of ``xi``."""
        return np.inf if self.ratio == 0 else -np.log(self.ratio)


def correlation_length(A: np.ndarray, rtol: float = 1e-12) -> CorrelationLength:
    """Correlation length under C(r) ~ exp(-r / xi).

    Raises:
        ValueError: if the transfer matrix vanishes.
    """
    ev = transfer_spectrum(A)
    l1 = ev[0]
    if abs(l1) == 0:
        raise ValueError("transfer matrix has zero spectral radius")
    l2 = ev[1] if len(ev) > 1 else 0.0
    ratio = abs(l2) / abs(l1)
    if ratio <= rtol:
        return CorrelationLength(0.0, 0.0, 0.0, complex(l1), complex(l2))
    if abs(ratio - 1) <= rtol:
        xi = np.inf
        ratio = 1.0
    else:
        xi = 1 / np.log(1 / ratio)
    return CorrelationLength(float(xi), float(ratio), float(np.angle(l2 / l1)), complex(l1), complex(l2))


def _check_op(A: np.ndarray, *ops: np.ndarray) -> None:
    d = A.shape[0]
    for op in ops:
        if np.shape(op) != (d, d):
            raise ValueError(f"operator shape {np.shape(op)} does not match d={d}")


def expectation(A: np.ndarray, O: np.ndarray, n: int) -> complex:
    """<O_1> on the n-site ring."""
    _check_op(A, O)
    T = transfer_matrix(A)
    Tn1 = np.linalg.matrix_power(T, n - 1)
    return complex(np.trace(transfer_matrix(A, O) @ Tn1) / np.trace(Tn1 @ T))


def connected_correlator(A: np.ndarray, O1: np.ndarray, O2: np.ndarray, r: int, n: int) -> complex:
    """<O1_1 O2_{r+1}> - <O1_1><O2_{r+1}> on the n-site ring, exact at finite n."""
    if not 0 < r < n:
        raise ValueError(f"need 0 < r < n, got r={r}, n={n}")
    _check_op(A, O1, O2)
    T = transfer_matrix(A)
    T1 = transfer_matrix(A, O1)
    T2 = transfer_matrix(A, O2)
    mp = np.linalg.matrix_power
    Z = np.trace(mp(T, n))
    two = np.trace(T1 @ mp(T, r - 1) @ T2 @ mp(T, n - r - 1)) / Z
    one1 = np.trace(T1 @ mp(T, n - 1)) / Z
    one2 = np.trace(T2 @ mp(T, n - 1)) / Z
    return complex(two - one1 * one2)


def _site_op(psi: np.ndarray, op: np.ndarray, site: int, d: int, n: int) -> np.ndarray:
    t = psi.reshape((d,) * n)
    out = np.moveaxis(np.tensordot(op, t, axes=([1], [site])), 0, site)
    return out.reshape(-1)


def brute_force_correlator(psi: np.ndarray, O1: np.ndarray, O2: np.ndarray, r: int, d: int, n: int) -> complex:
    """Connected correlator from an explicit state vector (test oracle)."""
    nrm = np.vdot(psi, psi)
    o2 = _site_op(psi, O2, r, d, n)
    two = np.vdot(psi, _site_op(o2, O1, 0, d, n)) / nrm
    e1 = np.vdot(psi, _site_op(psi, O1, 0, d, n)) / nrm
    e2 = np.vdot(psi, o2) / nrm
    return complex(two - e1 * e2)


def correlator_scan(A: np.ndarray, O1: np.ndarray, O2: np.ndarray, n: int, r_max: int | None = None):
    """Rows ``(r, full, connected)`` for r = 1 .. r_max."""
    r_max = n - 1 if r_max is None else r_max
    T = transfer_matrix(A)
    T1 = transfer_matrix(A, O1)
    T2 = transfer_matrix(A, O2)
    mp = np.linalg.matrix_power
    Z = np.trace(mp(T, n))
    one1 = np.trace(T1 @ mp(T, n - 1)) / Z
    one2 = np.trace(T2 @ mp(T, n - 1)) / Z
    rows = []
    for r in range(1, r_max + 1):
        two = np.trace(T1 @ mp(T, r - 1) @ T2 @ mp(T, n - r - 1)) / Z
        rows.append((r, complex(two), complex(two - one1 * one2)))
    return rows


def correlator_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r", "re", "im", "connected_re", "connected_im"])
    for r, full, conn in rows:
        w.writerow([r, repr(full.real), repr(full.imag), repr(conn.real), repr(conn.imag)])
    return buf.getvalue()
