"""Shared numerics: spin matrices, lattices, two-site operator embedding and
truncated power series.

Conventions used throughout the package:

* single-site basis is the S^z eigenbasis ordered from m = S down to m = -S;
* many-body state vectors are flat arrays with site 0 as the slowest index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "SpinOps",
    "spin_operators",
    "Lattice",
    "ring",
    "open_chain",
    "torus",
    "TwoSiteOp",
    "two_site_embed",
    "apply_sum",
    "translate",
    "TruncatedSeries",
    "series_add",
    "series_mul",
    "series_scalar_inverse",
]


@dataclass(frozen=True)
class SpinOps:
    two_s: int
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray

    @property
    def spin(self) -> float:
        return self.two_s / 2

    @property
    def dim(self) -> int:
        return self.two_s + 1

    @property
    def sp(self) -> np.ndarray:
        return self.sx + 1j * self.sy

    @property
    def sm(self) -> np.ndarray:
        return self.sx - 1j * self.sy

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)


def spin_operators(two_s: int) -> SpinOps:
    """Spin-S matrices with S = two_s / 2 in the descending-m basis.

    Raises:
        ValueError: if ``two_s < 1``.
    """
    two_s = int(two_s)
    if two_s < 1:
        raise ValueError(f"two_s must be >= 1, got {two_s}")
    s = two_s / 2
    m = s - np.arange(two_s + 1)
    sp = np.zeros((two_s + 1, two_s + 1), dtype=complex)
    for k in range(1, two_s + 1):
        # S^+ |m_k> = sqrt(S(S+1) - m_k(m_k+1)) |m_k + 1>
        sp[k - 1, k] = np.sqrt(s * (s + 1) - m[k] * (m[k] + 1))
    sm = sp.conj().T
    return SpinOps(
        two_s=two_s,
        sx=(sp + sm) / 2,
        sy=(sp - sm) / 2j,
        sz=np.diag(m).astype(complex),
    )


@dataclass(frozen=True)
class Lattice:
    """Ring, open chain or torus with an explicit oriented edge list.

    Torus sites are numbered row-major, ``site = y * Lx + x``.
    Edges point from a site to its +x / +y neighbour. Periodic directions of
    length 2 keep both wrap edges, so every site has four edge ends.
    """

    kind: str
    shape: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in ("ring", "open_chain", "torus"):
            raise ValueError(f"unknown lattice kind {self.kind!r}")
        if any(n < 1 for n in self.shape):
            raise ValueError("lattice extents must be positive")
        if self.kind == "torus" and len(self.shape) != 2:
            raise ValueError("torus needs (Lx, Ly)")
        if self.kind != "torus" and len(self.shape) != 1:
            raise ValueError("chains need a single length")

    @property
    def n_sites(self) -> int:
        return int(np.prod(self.shape))

    def site(self, x: int, y: int = 0) -> int:
        if self.kind != "torus":
            return x
        lx, ly = self.shape
        return (y % ly) * lx + (x % lx)

    @cached_property
    def edges(self) -> tuple[tuple[int, int, str], ...]:
        """Oriented edges ``(i, j, direction)`` with direction in {chain, x, y}."""
        out: list[tuple[int, int, str]] = []
        if self.kind == "ring":
            (n,) = self.shape
            out = [(j, (j + 1) % n, "chain") for j in range(n)]
        elif self.kind == "open_chain":
            (n,) = self.shape
            out = [(j, j + 1, "chain") for j in range(n - 1)]
        else:
            lx, ly = self.shape
            for y in range(ly):
                for x in range(lx):
                    out.append((self.site(x, y), self.site(x + 1, y), "x"))
            for y in range(ly):
                for x in range(lx):
                    out.append((self.site(x, y), self.site(x, y + 1), "y"))
        return tuple(out)

    @property
    def has_duplicate_edges(self) -> bool:
        pairs = [frozenset((i, j)) for i, j, _ in self.edges]
        return len(set(pairs)) != len(pairs)

    def degree(self, v: int) -> int:
        return sum((i == v) + (j == v) for i, j, _ in self.edges)

    def describe(self) -> dict:
        return {"kind": self.kind, "shape": list(self.shape),
                "n_edges": len(self.edges), "duplicate_edges": self.has_duplicate_edges}


def ring(n: int) -> Lattice:
    return Lattice("ring", (int(n),))


def open_chain(n: int) -> Lattice:
    return Lattice("open_chain", (int(n),))


def torus(lx: int, ly: int) -> Lattice:
    return Lattice("torus", (int(lx), int(ly)))


@dataclass(frozen=True)
class TwoSiteOp:
    """Matrix-free action of a d^2 x d^2 operator on sites (i, j) of n qudits."""

    op: np.ndarray
    i: int
    j: int
    n_sites: int
    d: int

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """Act on a state vector, or on each column of a (d^n, k) array."""
        d, n = self.d, self.n_sites
        if psi.shape[0] != d**n:
            raise ValueError(f"state has {psi.shape[0]} amplitudes, expected {d ** n}")
        t = psi.reshape((d,) * n + psi.shape[1:])
        op4 = self.op.reshape(d, d, d, d)
        out = np.tensordot(op4, t, axes=([2, 3], [self.i, self.j]))
        # tensordot puts the two new legs first
        out = np.moveaxis(out, [0, 1], [self.i, self.j])
        return out.reshape(psi.shape)


def two_site_embed(op2: np.ndarray, edge: tuple[int, int], lattice: Lattice, d: int) -> TwoSiteOp:
    op2 = np.asarray(op2, dtype=complex)
    if op2.shape != (d * d, d * d):
        raise ValueError(f"op2 has shape {op2.shape}, expected ({d * d}, {d * d})")
    i, j = edge[0], edge[1]
    n = lattice.n_sites
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise ValueError(f"edge {edge} not valid on {n} sites")
    if not any((i, j) == (a, b) for a, b, _ in lattice.edges):
        raise ValueError(f"edge {edge} is not in the lattice")
    return TwoSiteOp(op2, i, j, n, d)


def apply_sum(terms: Iterable[TwoSiteOp], psi: np.ndarray) -> np.ndarray:
    out = np.zeros_like(psi, dtype=complex)
    for term in terms:
        out += term.apply(psi)
    return out


def translate(psi: np.ndarray, d: int, n: int, shift: int = 1) -> np.ndarray:
    """Cyclic translation of a ring state: site j -> j + shift."""
    t = psi.reshape((d,) * n)
    return np.moveaxis(t, list(range(n)), [(k + shift) % n for k in range(n)]).reshape(psi.shape)


def _scalar_mul(x, y):
    return x * y


@dataclass(frozen=True)
class TruncatedSeries:
    """Polynomial sum_n coeffs[n] t^n truncated at ``order``.

    Coefficients are stacked along axis 0, so ``coeffs.shape == (order + 1, *shape)``.
    Multiplication uses ``product`` on the coefficient objects (``np.matmul`` for
    matrix-valued series); the default is the elementwise product.
    """

    coeffs: np.ndarray
    product: Callable = field(default=_scalar_mul, compare=False, repr=False)

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @classmethod
    def constant(cls, value, order: int, product: Callable = _scalar_mul) -> "TruncatedSeries":
        value = np.asarray(value, dtype=complex)
        c = np.zeros((order + 1,) + value.shape, dtype=complex)
        c[0] = value
        return cls(c, product)

    @classmethod
    def variable(cls, order: int) -> "TruncatedSeries":
        c = np.zeros(order + 1, dtype=complex)
        if order >= 1:
            c[1] = 1
        return cls(c)

    def __add__(self, other):
        return series_add(self, other)

    def __sub__(self, other):
        return series_add(self, -other)

    def __neg__(self):
        return TruncatedSeries(-self.coeffs, self.product)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_mul(self, other)
        return TruncatedSeries(self.coeffs * other, self.product)

    __rmul__ = __mul__

    def evaluate(self, t: complex) -> np.ndarray:
        powers = t ** np.arange(self.order + 1)
        return np.tensordot(powers, self.coeffs, axes=(0, 0))

    def shift(self, k: int = 1) -> "TruncatedSeries":
        """Multiply by t^k, dropping powers beyond the order."""
        c = np.zeros_like(self.coeffs)
        if k <= self.order:
            c[k:] = self.coeffs[: self.order + 1 - k]
        return TruncatedSeries(c, self.product)


def series_add(s: TruncatedSeries, u: TruncatedSeries) -> TruncatedSeries:
    if s.order != u.order:
        raise ValueError(f"order mismatch: {s.order} vs {u.order}")
    return TruncatedSeries(s.coeffs + u.coeffs, s.product)


def series_mul(s: TruncatedSeries, u: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated at the common order."""
    if s.order != u.order:
        raise ValueError(f"order mismatch: {s.order} vs {u.order}")
    order = s.order
    terms = [s.product(s.coeffs[0], u.coeffs[n]) for n in range(order + 1)]
    out = np.zeros((order + 1,) + np.shape(terms[0]), dtype=complex)
    for n in range(order + 1):
        for p in range(n + 1):
            out[n] += s.product(s.coeffs[p], u.coeffs[n - p])
    return TruncatedSeries(out, s.product)


def series_scalar_inverse(s: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse of a scalar series.

    Raises:
        ZeroDivisionError: if the constant term vanishes.
    """
    c = np.asarray(s.coeffs)
    if c.ndim != 1:
        raise ValueError("only scalar series can be inverted")
    if c[0] == 0:
        raise ZeroDivisionError("series has vanishing constant term")
    inv = np.zeros_like(c, dtype=complex)
    inv[0] = 1 / c[0]
    for n in range(1, len(c)):
        inv[n] = -np.dot(c[1 : n + 1], inv[n - 1 :: -1][:n]) / c[0]
    return TruncatedSeries(inv, s.product)


def stack_states(states: Sequence[np.ndarray]) -> np.ndarray:
    return np.stack([np.asarray(v, dtype=complex).ravel() for v in states], axis=1)
