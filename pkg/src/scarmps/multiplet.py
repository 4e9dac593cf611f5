"""Model I scar multiplet from the 1/a expansion of the MPS, and the closed-form
states built from generalized lowering operators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import TruncatedSeries, series_scalar_inverse, translate
from .models import Model1Params, model1_series_parts
from .mps1d import MAX_AMPLITUDES

__all__ = [
    "SeriesMps",
    "MultipletBasis",
    "model1_series_mps",
    "series_pbc_state",
    "expand_multiplet",
    "vn_formula",
    "collinearity",
    "rydberg_mask",
    "rydberg_projector",
    "rank_of",
    "normalize_phase",
    "momentum_residual",
    "b_over_a_series",
]


@dataclass(frozen=True)
class SeriesMps:
    """Site tensor whose entries are truncated series in t = 1/a."""

    series: TruncatedSeries  # coefficients shaped (order + 1, d, chi, chi)

    @property
    def order(self) -> int:
        return self.series.order

    @property
    def d(self) -> int:
        return self.series.coeffs.shape[1]

    def evaluate(self, t: complex) -> np.ndarray:
        return self.series.evaluate(t)


def b_over_a_series(delta_s: complex, order: int) -> TruncatedSeries:
    """b / a = t / (t - Delta_S) as a series in t = 1/a."""
    denom = TruncatedSeries(np.array([-delta_s] + [1] + [0] * (order - 1), dtype=complex)[: order + 1])
    return series_scalar_inverse(denom).shift(1)


def model1_series_mps(two_s: int, D, order: int) -> SeriesMps:
    p = Model1Params(two_s, D, a=1e6)  # a is irrelevant here; only validates D
    A1, A2, A0 = model1_series_parts(two_s)
    ba = b_over_a_series(p.delta_s, order).coeffs
    c = np.zeros((order + 1,) + A1.shape, dtype=complex)
    c[0] += A1
    if order >= 1:
        c[1] += A0
    c += ba[:, None, None, None] * A2
    return SeriesMps(TruncatedSeries(c))


def _chain_product(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    chi = x.shape[-1]
    return np.einsum("kab,sbc->ksac", x, y).reshape(-1, chi, chi)


def series_pbc_state(smps: SeriesMps, n: int, cap: int = MAX_AMPLITUDES) -> TruncatedSeries:
    """Tr(A ... A) evaluated in truncated-series arithmetic; coefficient k is |v_k>."""
    if smps.d**n > cap:
        raise MemoryError(f"{smps.d}^{n} amplitudes exceed the cap of {cap}")
    site = TruncatedSeries(smps.series.coeffs, _chain_product)
    acc = site
    for _ in range(n - 1):
        acc = acc * site
    return TruncatedSeries(np.einsum("nkaa->nk", acc.coeffs))


def normalize_phase(v: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Unit norm with the first non-negligible amplitude real positive."""
    nrm = np.linalg.norm(v)
    if nrm == 0:
        return v.copy()
    v = v / nrm
    k = int(np.argmax(np.abs(v) > rtol * np.abs(v).max()))
    return v * (abs(v[k]) / v[k])


@dataclass
class MultipletBasis:
    vectors: list[np.ndarray]
    raw_norms: list[float]
    gram: np.ndarray
    rank: int
    two_s: int
    n_sites: int


def rank_of(vectors, rtol: float = 1e-8) -> int:
    """Numerical rank of the stacked vectors, singular values relative to the largest."""
    M = np.stack([np.asarray(v).ravel() for v in vectors], axis=1)
    sv = np.linalg.svd(M, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def expand_multiplet(two_s: int, D, n_sites: int, n_max: int | None = None) -> MultipletBasis:
    if n_sites % 2:
        raise ValueError("N must be even")
    n_max = n_sites // 2 if n_max is None else n_max
    if n_max > n_sites // 2:
        raise ValueError(f"n_max={n_max} exceeds N/2={n_sites // 2}")
    smps = model1_series_mps(two_s, D, n_max)
    coeffs = series_pbc_state(smps, n_sites).coeffs
    raw = [float(np.linalg.norm(c)) for c in coeffs]
    vecs = [normalize_phase(c) for c in coeffs]
    M = np.stack(vecs, axis=1)
    return MultipletBasis(vecs, raw, M.conj().T @ M, rank_of(vecs), two_s, n_sites)


def rydberg_mask(n_sites: int, two_s: int = 1) -> np.ndarray:
    """Boolean mask of configurations with no two ring neighbours both below m = S."""
    d = two_s + 1
    idx = np.indices((d,) * n_sites).reshape(n_sites, -1)
    excited = idx != 0
    bad = np.zeros(idx.shape[1], dtype=bool)
    for j in range(n_sites if n_sites > 2 else n_sites - 1):
        bad |= excited[j] & excited[(j + 1) % n_sites]
    return ~bad


class rydberg_projector:
    """Diagonal projector onto the generalized Rydberg subspace of a ring."""

    def __init__(self, n_sites: int, two_s: int = 1):
        self.mask = rydberg_mask(n_sites, two_s)
        self.n_sites = n_sites
        self.two_s = two_s

    @property
    def rank(self) -> int:
        return int(self.mask.sum())

    def apply(self, psi: np.ndarray) -> np.ndarray:
        return np.where(self.mask, psi, 0)

    __call__ = apply

    def leakage(self, psi: np.ndarray) -> float:
        """||(1 - P) psi|| / ||psi||."""
        return float(np.linalg.norm(psi[~self.mask]) / np.linalg.norm(psi))


def _lower(psi: np.ndarray, sites, n: int) -> np.ndarray:
    """Apply e^{21} (|down><up|) on each of ``sites``."""
    t = psi.reshape((2,) * n)
    for j in sites:
        out = np.zeros_like(t)
        src = [slice(None)] * n
        dst = [slice(None)] * n
        src[j], dst[j] = 0, 1
        out[tuple(dst)] = t[tuple(src)]
        t = out
    return t.reshape(-1)


def _s_minus(psi, n):
    return sum(_lower(psi, [j], n) for j in range(n))


def _s2(psi, n, sep):
    return sum(_lower(psi, [j, (j + sep + 1) % n], n) for j in range(n))


def _s31(psi, n):
    return sum(_lower(psi, [(j - 2) % n, j, (j + 2) % n], n) for j in range(n))


def _power(op, psi, k):
    for _ in range(k):
        psi = op(psi)
    return psi


def vn_formula(n_sites: int, delta: complex, n: int) -> np.ndarray:
    """Closed-form |v_n>, n = 1..5, for S = 1/2 (unnormalized)."""
    if n not in range(1, 6):
        raise ValueError(f"n must be in 1..5, got {n}")
    N = n_sites
    if N % 2 or N < 2 * n:
        raise ValueError(f"need even N >= {2 * n}")
    up = np.zeros(2**N, complex)
    up[0] = 1
    sm = lambda v: _s_minus(v, N)  # noqa: E731
    s2 = lambda v, k: _s2(v, N, k)  # noqa: E731
    dl = delta
    if n == 1:
        v = sm(up)
    elif n == 2:
        v = _power(sm, up, 2)
    elif n == 3:
        v = 1j / 6 * _power(sm, up, 3) + s2(up, 1) / dl
    elif n == 4:
        v = (
            _power(sm, up, 4) / 24
            - 1j / dl * sm(s2(up, 1))
            + (s2(up, 2) - s2(up, 1)) / dl**2
        )
    else:
        v = (
            1j / math.factorial(5) * _power(sm, up, 5)
            + _power(sm, s2(up, 1), 2) / (2 * dl)
            + 1j / dl**2 * (sm(s2(up, 2) - s2(up, 1)) - _s31(up, N))
            - (s2(up, 1) - 2 * s2(up, 2) + s2(up, 3)) / dl**3
        )
    return rydberg_projector(N, 1).apply(v)


def collinearity(u: np.ndarray, v: np.ndarray) -> float:
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise ValueError("zero vector")
    return float(min(1.0, abs(np.vdot(u, v)) / (nu * nv)))


def momentum_residual(psi: np.ndarray, d: int, n: int) -> float:
    return float(np.linalg.norm(translate(psi, d, n) - psi) / np.linalg.norm(psi))

