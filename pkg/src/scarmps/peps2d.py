"""Exact 2D tensor-network states on small tori."""

from __future__ import annotations

import string

import numpy as np

from .core import apply_sum, torus
from .models import LocalTerm
from .verifier import Residual, frustration_free_residual, hamiltonian_terms

__all__ = [
    "MAX_AMPLITUDES",
    "build_torus_state",
    "schmidt_values",
    "schmidt_rank",
    "frustration_free_check",
    "energy_expectation",
    "transpose_legs",
]

MAX_AMPLITUDES = 10**8
_LETTERS = string.ascii_letters


def build_torus_state(
    A: np.ndarray, lx: int, ly: int, require_even: bool = False, cap: int = MAX_AMPLITUDES
) -> np.ndarray:
    """Contract one copy of A per site of an Lx x Ly torus.

    Sites are numbered ``y * Lx + x`` and site 0 is the slowest index of the
    returned vector. Every site owns the x bond to its +x neighbour and the y
    bond to its +y neighbour, so a length-2 direction carries two distinct bonds.
    """
    A = np.asarray(A, dtype=complex)
    d = A.shape[0]
    if require_even and (lx % 2 or ly % 2):
        raise ValueError(f"both torus extents must be even, got {lx}x{ly}")
    n = lx * ly
    if d**n > cap:
        raise MemoryError(f"{d}^{n} amplitudes exceed the cap of {cap}")
    if 3 * n > len(_LETTERS):
        raise ValueError("torus too large for a single contraction")
    lat = torus(lx, ly)
    phys = _LETTERS[:n]
    xb = _LETTERS[n : 2 * n]  # bond leaving site v in +x
    yb = _LETTERS[2 * n : 3 * n]  # bond leaving site v in +y
    specs = []
    for y in range(ly):
        for x in range(lx):
            v = lat.site(x, y)
            left = lat.site(x - 1, y)
            down = lat.site(x, y - 1)
            specs.append(phys[v] + xb[left] + xb[v] + yb[down] + yb[v])
    expr = ",".join(specs) + "->" + phys
    out = np.einsum(expr, *([A] * n), optimize="greedy")
    return out.reshape(-1)


def transpose_legs(A: np.ndarray) -> np.ndarray:
    """Swap the roles of the x and y legs."""
    return np.asarray(A).transpose(0, 3, 4, 1, 2)


def schmidt_values(psi: np.ndarray, part: list[int], d: int, n_sites: int) -> np.ndarray:
    part = sorted(set(part))
    if not part or len(part) == n_sites:
        raise ValueError("bipartition must be nontrivial")
    rest = [k for k in range(n_sites) if k not in part]
    t = np.asarray(psi).reshape((d,) * n_sites).transpose(part + rest)
    return np.linalg.svd(t.reshape(d ** len(part), -1), compute_uv=False)


def schmidt_rank(values: np.ndarray, rtol: float = 1e-10) -> int:
    if values.size == 0 or values[0] == 0:
        return 0
    return int(np.sum(values > rtol * values[0]))


def frustration_free_check(h: LocalTerm, A: np.ndarray) -> dict[str, Residual]:
    return {dr: frustration_free_residual(h, A, dr) for dr in "xy"}


def energy_expectation(h: LocalTerm, psi: np.ndarray, lx: int, ly: int) -> complex:
    terms = hamiltonian_terms(h, torus(lx, ly))
    hpsi = apply_sum(terms, psi)
    return complex(np.vdot(psi, hpsi) / np.vdot(psi, psi))
