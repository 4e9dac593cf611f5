"""Exact diagonalization on small lattices: zero-energy counts, momentum
sectors and the open-chain scar."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator

from .core import Lattice, apply_sum, open_chain, spin_operators, translate
from .models import LocalTerm, Model1Params, ParameterDomainError, model1_density, model1_tensors
from .mps1d import BoundaryVectors, build_obc
from .verifier import hamiltonian_terms

__all__ = [
    "DENSE_CAP",
    "ZERO_EPS",
    "SpectrumReport",
    "ObcSetup",
    "assemble",
    "zero_space",
    "momentum_filter",
    "obc_scar_check",
    "eigenvalue_csv",
]

DENSE_CAP = 20_000
ZERO_EPS = 1e-8


def assemble(
    h: LocalTerm,
    lattice: Lattice,
    boundary: list[tuple[int, np.ndarray]] | None = None,
    dense: bool | None = None,
    check_hermitian: bool = True,
):
    """Full Hamiltonian as a dense array, or a ``LinearOperator`` above the dense cap.

    Raises:
        MemoryError: if ``dense=True`` is requested above ``DENSE_CAP``.
    """
    dim = h.d**lattice.n_sites
    terms = hamiltonian_terms(h, lattice, boundary)
    if dense is None:
        dense = dim <= DENSE_CAP
    if not dense:
        return LinearOperator((dim, dim), matvec=lambda v: apply_sum(terms, np.asarray(v, complex)), dtype=complex)
    if dim > DENSE_CAP:
        raise MemoryError(f"dimension {dim} exceeds dense cap {DENSE_CAP}")
    H = apply_sum(terms, np.eye(dim, dtype=complex))
    if check_hermitian:
        err = np.abs(H - H.conj().T).max()
        if err > 1e-12 * max(1.0, np.abs(H).max()):
            raise ValueError(f"assembled H is not Hermitian (max deviation {err:.2e})")
    return H


@dataclass
class SpectrumReport:
    dim: int
    zero_count: int
    gap: float
    threshold: float
    certified: bool
    scale: float
    eigenvalues: np.ndarray = field(repr=False)
    zero_vectors: np.ndarray = field(repr=False)

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "zero_count": self.zero_count,
            "gap": self.gap,
            "threshold": self.threshold,
            "certified": self.certified,
            "spectral_norm": self.scale,
        }


def zero_space(H: np.ndarray, eps: float = ZERO_EPS, vectors: bool = True) -> SpectrumReport:
    """Count eigenvalues with |lambda| <= eps * ||H||_2.

    The count is certified when the smallest |lambda| above the threshold is at
    least ten times the threshold.
    """
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("H must be square")
    if not np.allclose(H, H.conj().T, rtol=0, atol=1e-12 * max(1.0, np.abs(H).max())):
        raise ValueError("H is not Hermitian")
    if vectors:
        w, v = np.linalg.eigh(H)
    else:
        w, v = np.linalg.eigvalsh(H), None
    scale = float(np.abs(w).max()) if w.size else 0.0
    thr = eps * scale
    zero = np.abs(w) <= thr
    rest = np.abs(w[~zero])
    gap = float(rest.min()) if rest.size else np.inf
    zv = v[:, zero] if v is not None else np.empty((H.shape[0], 0))
    return SpectrumReport(
        dim=H.shape[0],
        zero_count=int(zero.sum()),
        gap=gap,
        threshold=thr,
        certified=bool(gap >= 10 * thr),
        scale=scale,
        eigenvalues=w,
        zero_vectors=zv,
    )


def momentum_filter(states, n_sites: int, d: int, tol: float = 1e-8) -> dict[int, int]:
    """Counts of translation eigenvalues exp(2 pi i k / N) within the span of ``states``.

    Raises:
        ValueError: if the span is not mapped into itself by translation.
    """
    M = np.stack([np.asarray(v, complex).ravel() for v in states], axis=1)
    u, s, _ = np.linalg.svd(M, full_matrices=False)
    Q = u[:, s > tol * s[0]]
    TQ = np.stack([translate(Q[:, k], d, n_sites) for k in range(Q.shape[1])], axis=1)
    Tr = Q.conj().T @ TQ
    leak = np.linalg.norm(TQ - Q @ Tr)
    if leak > 1e-6 * np.sqrt(Q.shape[1]):
        raise ValueError(f"span is not translation invariant (leakage {leak:.2e})")
    ev = np.linalg.eigvals(Tr)
    ks = np.mod(np.rint(np.angle(ev) * n_sites / (2 * np.pi)).astype(int), n_sites)
    counts = {k: 0 for k in range(n_sites)}
    for k in ks:
        counts[int(k)] += 1
    return counts


@dataclass(frozen=True)
class ObcSetup:
    D: tuple[float, float, float]
    hz1: float = 0.0
    hxN: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "D", tuple(float(x) for x in self.D))
        dx, _, dz = self.D
        if dx == 0 or dz == 0:
            raise ParameterDomainError("parameter domain: D_x and D_z must be nonzero")

    @property
    def params(self) -> Model1Params:
        dx, dy, dz = self.D
        delta = (dy - 1j * dx) / dz
        return Model1Params(1, self.D, a=2 / delta)

    @property
    def h1(self) -> tuple[float, float, float]:
        dx, dy, _ = self.D
        return (-dy, dx, self.hz1)

    @property
    def hN(self) -> tuple[float, float, float]:
        dx, dy, dz = self.D
        beta = (dx**2 + dy**2) / dx
        hy = beta + dy * self.hxN / dx
        hz = -(dx**2 + dy**2 - dz**2) * (dy + self.hxN) / (2 * dx * dz)
        return (self.hxN, hy, hz)

    @property
    def energy(self) -> float:
        dx, dy, dz = self.D
        delta = (dy - 1j * dx) / dz
        d2 = dx**2 + dy**2 + dz**2
        return dy * dz / (2 * dx) * (1 + abs(delta) ** 2) + self.hz1 + self.hxN * d2 / (2 * dx * dz)

    @property
    def boundary_vectors(self) -> BoundaryVectors:
        return BoundaryVectors(np.array([1, -1j]), np.array([1, 1j]))

    def boundary_terms(self, n_sites: int) -> list[tuple[int, np.ndarray]]:
        ops = spin_operators(1)
        pauli = (2 * ops.sx, 2 * ops.sy, 2 * ops.sz)
        field_op = lambda hv: sum(c * p for c, p in zip(hv, pauli))  # noqa: E731
        return [(0, field_op(self.h1)), (n_sites - 1, field_op(self.hN))]


def obc_scar_check(setup: ObcSetup, n_sites: int, ed_max_sites: int = 10) -> dict:
    p = setup.params
    h = model1_density(p)
    A, _ = model1_tensors(p)
    psi = build_obc(A, setup.boundary_vectors, n_sites)
    lat = open_chain(n_sites)
    terms = hamiltonian_terms(h, lat, setup.boundary_terms(n_sites))
    hpsi = apply_sum(terms, psi)
    nrm = np.linalg.norm(psi)
    e_pred = setup.energy
    out = {
        "n_sites": n_sites,
        "energy_predicted": e_pred,
        "energy_measured": float(np.real(np.vdot(psi, hpsi) / nrm**2)),
        "residual": float(np.linalg.norm(hpsi - e_pred * psi) / nrm),
    }
    if n_sites <= ed_max_sites:
        H = apply_sum(terms, np.eye(2**n_sites, dtype=complex))
        w = np.linalg.eigvalsh(H)
        scale = np.abs(w).max()
        close = np.abs(w - e_pred) <= ZERO_EPS * scale
        others = np.abs(w[~close] - e_pred)
        out["multiplicity"] = int(close.sum())
        out["gap_to_rest"] = float(others.min()) if others.size else float("inf")
    return out


def eigenvalue_csv(w: np.ndarray) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["index", "value"])
    for k, x in enumerate(np.asarray(w).real):
        wr.writerow([k, repr(float(x))])
    return buf.getvalue()
