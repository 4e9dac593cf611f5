"""Hamiltonian densities and (A, E) tensors of the four model families.

1D tensors are arrays of shape ``(d, chi, chi)``; 2D tensors have shape
``(d, chi, chi, chi, chi)`` with legs ordered ``(a_x, b_x, a_y, b_y)``, where
``a`` legs are incoming and ``b`` legs outgoing.  A table entry written as
``[A^s]^{alpha beta}_{gamma delta}`` is stored at ``A[s, gamma, alpha, delta, beta]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, asdict
from typing import Any

import numpy as np

from .core import spin_operators

__all__ = [
    "LocalTerm",
    "ErrorTensorSet",
    "Model1Params",
    "Model2Params",
    "Spin2TwoDParams",
    "XyzDmParams",
    "model1_density",
    "model1_tensors",
    "model2_density",
    "model2_tensors",
    "spin2_2d_model",
    "spin2_link_states",
    "xyz_dm_2d_model",
    "params_from_dict",
    "params_to_dict",
]

MODEL1_VERIFIED_TWO_S = (1, 2, 3, 4)


class ParameterDomainError(ValueError):
    """Raised when model parameters fall outside the domain where tensors are defined."""


@dataclass(frozen=True)
class LocalTerm:
    d: int
    matrix: np.ndarray
    label: str

    def is_hermitian(self, atol: float = 1e-13) -> bool:
        return bool(np.allclose(self.matrix, self.matrix.conj().T, rtol=0, atol=atol))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))


@dataclass
class ErrorTensorSet:
    """Error tensors keyed by slot label, with the sign each slot carries.

    In 1D the slots are ``left`` and ``right``; a link ``h A A = E A - A E`` is the
    signed form ``(+1) E_left A + (-1) A E_right`` with ``E_left = E_right = E``.
    In 2D the slots are ``E1`` ... ``E4`` as published; which slot sits on which
    end of which bond is decided by :func:`scarmps.verifier.convention_search`.
    """

    slots: dict[str, np.ndarray]
    signs: dict[str, int] = field(default_factory=dict)

    def sign(self, key: str) -> int:
        return self.signs.get(key, 1)

    def signed_sum(self) -> np.ndarray:
        return sum(self.sign(k) * v for k, v in self.slots.items())


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ParameterDomainError(f"parameter domain: {msg}")


# ---------------------------------------------------------------------------
# Model I: generalized Rydberg + DM chain


@dataclass(frozen=True)
class Model1Params:
    two_s: int
    D: tuple[float, float, float]
    a: complex = 2.0

    def __post_init__(self):
        object.__setattr__(self, "D", tuple(float(x) for x in self.D))
        object.__setattr__(self, "a", complex(self.a))
        _require(self.two_s >= 1, "two_s must be >= 1")
        _require(len(self.D) == 3, "D must have three components")
        _require(self.D[0] != 0, "D_x must be nonzero (beta undefined)")
        _require(self.D[2] != 0, "D_z must be nonzero (Delta undefined)")
        _require(self.a != 0, "a must be nonzero")
        _require(abs(1 - self.a * self.delta_s) > 1e-14, "a * Delta_S == 1 (b undefined)")

    @property
    def spin(self) -> float:
        return self.two_s / 2

    @property
    def delta(self) -> complex:
        dx, dy, dz = self.D
        return (dy - 1j * dx) / dz

    @property
    def delta_s(self) -> complex:
        return self.delta / np.sqrt(self.two_s)

    @property
    def b(self) -> complex:
        return self.a / (1 - self.a * self.delta_s)

    @property
    def alpha(self) -> complex:
        dx, dy, _ = self.D
        return -(dy + 1j * dx)

    @property
    def beta(self) -> float:
        dx, dy, _ = self.D
        return (dx**2 + dy**2) / dx

    def with_a(self, a: complex) -> "Model1Params":
        return Model1Params(self.two_s, self.D, a)


def dm_term(D, ops) -> np.ndarray:
    """D . (S x S') on two sites."""
    sx, sy, sz = ops.sx, ops.sy, ops.sz
    k = np.kron
    cross = (
        k(sy, sz) - k(sz, sy),
        k(sz, sx) - k(sx, sz),
        k(sx, sy) - k(sy, sx),
    )
    return sum(c * x for c, x in zip(D, cross))


def model1_density(p: Model1Params) -> LocalTerm:
    ops = spin_operators(p.two_s)
    one = ops.identity
    r = one - ops.sz / ops.spin
    h = np.kron(r, r) + 4 * dm_term(p.D, ops)
    return LocalTerm(ops.dim, h, f"model1(S={p.two_s}/2)")


def model1_tensors(p: Model1Params) -> tuple[np.ndarray, np.ndarray | None]:
    """Bond-dimension-2 tensor A, and the closed-form E for S = 1/2.

    For S >= 1 the error tensor is returned as ``None``; obtain it with
    :func:`scarmps.verifier.solve_E_given_A`.
    """
    _require(p.two_s in MODEL1_VERIFIED_TWO_S, f"2S={p.two_s} outside the verified range 1..4")
    d = p.two_s + 1
    a, b = p.a, p.b
    top = np.zeros(d, complex)
    top[0] = 1
    low = np.zeros(d, complex)
    low[1] = 1
    A = np.zeros((d, 2, 2), complex)
    A[:, 0, 0] = top + 1j / a * low
    A[:, 0, 1] = low / a
    A[:, 1, 0] = low / a
    A[:, 1, 1] = b / a * top - 1j / a * low
    if p.two_s != 1:
        return A, None

    _, _, dz = p.D
    al, be = p.alpha, p.beta
    alc = np.conj(al)
    E = np.zeros((2, 2, 2), complex)
    E[0, 0, 0] = 1j * al / a + a * be + 2j * dz * b / a
    E[1, 0, 0] = 1j * be + alc + 2 * b * alc / a
    E[0, 1, 1] = -1j * al / a + b * be + 2j * dz
    E[1, 1, 1] = -1j * be + 2 * alc + b * alc / a
    E[0, 0, 1] = E[0, 1, 0] = al / a
    E[1, 0, 1] = E[1, 1, 0] = be
    return A, E


def model1_series_parts(two_s: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The decomposition A = A1 + (b/a) A2 + (1/a) A0."""
    d = two_s + 1
    A1 = np.zeros((d, 2, 2), complex)
    A2 = np.zeros((d, 2, 2), complex)
    A0 = np.zeros((d, 2, 2), complex)
    A1[0, 0, 0] = 1
    A2[0, 1, 1] = 1
    A0[1] = np.array([[1j, 1], [1, -1j]])  # sigma^x + i sigma^z
    return A1, A2, A0


# ---------------------------------------------------------------------------
# Model II: isolated spin-1 scar


@dataclass(frozen=True)
class Model2Params:
    jy: float = 1.0
    jz: float = 1.0
    hy: float = 1.0

    def __post_init__(self):
        for name in ("jy", "jz", "hy"):
            object.__setattr__(self, name, float(getattr(self, name)))
            _require(np.isfinite(getattr(self, name)), f"{name} must be finite")


def model2_density(p: Model2Params) -> LocalTerm:
    """Bond density; each single-site term is shared equally by the two bonds of a site."""
    ops = spin_operators(2)
    one = ops.identity
    ss = sum(np.kron(s, s) for s in (ops.sx, ops.sy, ops.sz))
    onsite = (
        2 * p.hy * ops.sy
        + 2 * p.jz * (ops.sx @ ops.sx + ops.sz @ ops.sz)
        + 2 * p.jy * ops.sy @ ops.sy
        - (p.jy + 3 * p.jz) * one
    )
    h = (p.jy - p.jz) / 2 * (ss - ss @ ss) + 0.5 * (np.kron(onsite, one) + np.kron(one, onsite))
    return LocalTerm(3, h, "model2")


def model2_tensors(p: Model2Params | None = None) -> tuple[np.ndarray, np.ndarray]:
    hy = 0.0 if p is None else p.hy
    A = np.zeros((3, 2, 2), complex)
    A[2, 0, 0] = np.sqrt(2)  # |-1>
    A[1, 0, 1] = A[1, 1, 0] = 1  # |0>
    A[0, 1, 1] = np.sqrt(2)  # |1>
    plus = np.array([1, 0, 1]) / np.sqrt(2)
    E = np.zeros((3, 2, 2), complex)
    E[:, 0, 1] = -1j * hy * plus
    E[:, 1, 0] = 1j * hy * plus
    return A, E


# ---------------------------------------------------------------------------
# 2D helpers


def set_entry(T: np.ndarray, s: int, upper: tuple[int, int], lower: tuple[int, int], value) -> None:
    """Assign ``[T^s]^{upper}_{lower}`` using 1-based bond labels."""
    (bx, by), (ax, ay) = upper, lower
    T[s, ax - 1, bx - 1, ay - 1, by - 1] = value


def get_entry(T: np.ndarray, s: int, upper: tuple[int, int], lower: tuple[int, int]):
    (bx, by), (ax, ay) = upper, lower
    return T[s, ax - 1, bx - 1, ay - 1, by - 1]


_PAIRS = list(itertools.product((1, 2), repeat=2))


# ---------------------------------------------------------------------------
# Spin-2 model on the square lattice


@dataclass(frozen=True)
class Spin2TwoDParams:
    a: complex = 1.0
    b: complex = 1.0
    lam: tuple[float, ...] = (1.0, 1.0, 1.0, 1.0, 1.0)
    hz: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        object.__setattr__(self, "lam", tuple(float(x) for x in self.lam))
        object.__setattr__(self, "hz", float(self.hz))
        _require(self.a != 0 and self.b != 0, "a and b must be nonzero")
        _require(len(self.lam) == 5, "lambda needs five entries")


def _m_index(m: int, two_s: int = 4) -> int:
    return two_s // 2 - m


def spin2_link_states(a: complex, b: complex) -> dict[int, np.ndarray]:
    """Unnormalized two-site states with S^z_j + S^z_k = q for q = 4 ... 0."""

    def ket(*terms):
        v = np.zeros(25, complex)
        for c, m1, m2 in terms:
            v[_m_index(m1) * 5 + _m_index(m2)] += c
        return v

    return {
        4: ket((1, 2, 2)),
        3: ket((1, 1, 2), (-1, 2, 1)),
        2: ket((b / a**2, 1, 1), (-1, 2, 0), (-1, 0, 2)),
        1: ket((1, 2, -1), (-b, 1, 0), (b, 0, 1), (-1, -1, 2)),
        0: ket((1 / b**2, 2, -2), (1 / b**2, -2, 2), (-1 / a**2, 1, -1), (-1 / a**2, -1, 1), (1, 0, 0)),
    }


def spin_flip(v: np.ndarray, d: int = 5) -> np.ndarray:
    """|m, m'> -> |-m, -m'>."""
    return v.reshape(d, d)[::-1, ::-1].reshape(-1).copy()


def spin2_projectors(a: complex, b: complex) -> list[tuple[int, np.ndarray]]:
    """Rank-one projectors ``(q, P)`` for q = 4..0 and their spin-flipped partners.

    The projector rows carry the listed coefficients, i.e. ``P = |u><u|`` with
    ``u`` the complex conjugate of the normalized listed state, so that
    ``P (A o A) = 0`` holds for complex a, b as well.
    """
    out = []
    for q, v in spin2_link_states(a, b).items():
        for w in (v, spin_flip(v)):
            u = w.conj() / np.linalg.norm(w)
            out.append((q, np.outer(u, u.conj())))
    return out


def spin2_2d_model(p: Spin2TwoDParams) -> tuple[LocalTerm, np.ndarray, ErrorTensorSet]:
    ops = spin_operators(4)
    one = ops.identity
    h = np.zeros((25, 25), complex)
    for q, proj in spin2_projectors(p.a, p.b):
        h += p.lam[q] * proj
    h += p.hz * (np.kron(ops.sz, one) + np.kron(one, ops.sz))

    a, b, hz = p.a, p.b, p.hz
    m = _m_index
    A = np.zeros((5, 2, 2, 2, 2), complex)
    entries = [(2, (2, 2), (1, 1), b)]
    for al in (1, 2):
        entries += [(1, (2, 2), (al, 3 - al), a), (1, (al, 3 - al), (1, 1), a)]
    for al, be in _PAIRS:
        entries += [(0, (al, be), (be, al), 1), (0, (al, be), (al, be), 1)]
    for q, up, lo, val in entries:
        set_entry(A, m(q), up, lo, val)
        set_entry(A, m(-q), lo, up, val)

    E1 = np.zeros_like(A)
    table = [
        (1, (1, 2), (1, 1), a * hz), (1, (2, 1), (1, 1), a * hz), (1, (2, 2), (1, 2), a * hz),
        (-1, (1, 1), (2, 1), 3 * a * hz), (-1, (1, 2), (2, 2), 3 * a * hz), (-1, (2, 1), (2, 2), 3 * a * hz),
        (0, (2, 1), (2, 1), 4 * hz), (0, (2, 2), (2, 2), 4 * hz), (0, (1, 2), (2, 1), 4 * hz),
        (-2, (1, 1), (2, 2), 2 * b * hz), (2, (2, 2), (1, 1), 2 * b * hz),
        (-1, (1, 1), (1, 2), -a * hz), (1, (2, 2), (2, 1), 5 * a * hz),
    ]
    for q, up, lo, val in table:
        set_entry(E1, m(q), up, lo, val)
    E2 = np.zeros_like(A)
    E3 = np.zeros_like(A)
    for s in range(5):
        for up in _PAIRS:
            for lo in _PAIRS:
                set_entry(E2, s, up, lo, -get_entry(E1, 4 - s, lo, up))
                set_entry(E3, s, up, lo, get_entry(E1, s, up, lo[::-1]))
    E4 = -(E1 + E2 + E3)
    errs = ErrorTensorSet({"E1": E1, "E2": E2, "E3": E3, "E4": E4})
    return LocalTerm(5, h, "spin2_2d"), A, errs


# ---------------------------------------------------------------------------
# Spin-1 XYZ model with DM interaction on the square lattice


@dataclass(frozen=True)
class XyzDmParams:
    jx: float = 1.0
    jy: float = 2.0
    jz: float = 3.0
    dxy: float = 0.5
    hz_sign: int = 1

    def __post_init__(self):
        for name in ("jx", "jy", "jz", "dxy"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _require(self.hz_sign in (1, -1), "hz_sign must be +1 or -1")
        _require(self.jx != self.jy, "jx == jy (z_+ undefined)")
        _require((self.jx + self.jz) * (self.jy + self.jz) >= 0, "h_z would be complex")

    @property
    def hz(self) -> float:
        return self.hz_sign * float(np.sqrt((self.jx + self.jz) * (self.jy + self.jz)))

    @property
    def c(self) -> float:
        return self.jx + self.jy + self.jz

    @property
    def z_plus(self) -> float:
        return ((self.jx + self.jy + 2 * self.jz) - 2 * self.hz) / (self.jx - self.jy)


def _xyz_tensor(plus: np.ndarray, minus: np.ndarray) -> np.ndarray:
    bp = [[plus, minus], [minus, -plus]]
    bm = [[minus, -plus], [-plus, -minus]]
    outer = [[bp, bm], [bm, [[-x for x in row] for row in bp]]]
    T = np.zeros((3, 2, 2, 2, 2), complex)
    for ay, by, ax, bx in itertools.product(range(2), repeat=4):
        T[:, ax, bx, ay, by] = outer[ay][by][ax][bx]
    return T


def xyz_dm_2d_model(p: XyzDmParams) -> tuple[LocalTerm, np.ndarray, ErrorTensorSet]:
    ops = spin_operators(2)
    one = ops.identity
    k = np.kron
    h = (
        p.c * np.eye(9)
        + p.jx * k(ops.sx, ops.sx)
        + p.jy * k(ops.sy, ops.sy)
        + p.jz * k(ops.sz, ops.sz)
        + p.dxy * (k(ops.sx, ops.sy) - k(ops.sy, ops.sx))
        + p.hz * (k(ops.sz, one) + k(one, ops.sz))
    )
    zp = p.z_plus
    root = np.sqrt(complex(-2 * zp))  # principal branch when z_+ > 0
    e = np.eye(3)
    A = _xyz_tensor(zp * e[0] + e[2], root * e[1])
    E1 = _xyz_tensor(-2j * zp * p.dxy * e[0], -1j * p.dxy * root * e[1])
    errs = ErrorTensorSet({"E1": E1, "E2": -E1, "E3": E1.copy(), "E4": -E1})
    return LocalTerm(3, h, "xyz_dm_2d"), A, errs


# ---------------------------------------------------------------------------
# JSON round trip

_PARAM_TYPES = {
    "model1": Model1Params,
    "model2": Model2Params,
    "spin2_2d": Spin2TwoDParams,
    "xyz_dm_2d": XyzDmParams,
}


def _to_json_value(x: Any) -> Any:
    if isinstance(x, complex):
        return x.real if x.imag == 0 else [x.real, x.imag]
    if isinstance(x, tuple):
        return [_to_json_value(v) for v in x]
    return x


def _from_json_complex(x: Any) -> complex:
    if isinstance(x, (list, tuple)):
        re, im = x
        return complex(re, im)
    return complex(x)


def params_to_dict(p) -> dict:
    out = {k: _to_json_value(v) for k, v in asdict(p).items()}
    if "lam" in out:
        out["lambda"] = out.pop("lam")
    return out


def params_from_dict(model: str, data: dict):
    """Build a parameter object from JSON-style keys; unknown keys raise ``KeyError``."""
    cls = _PARAM_TYPES[model]
    data = dict(data)
    if "lambda" in data:
        data["lam"] = data.pop("lambda")
    allowed = set(cls.__dataclass_fields__)
    unknown = set(data) - allowed
    if unknown:
        raise KeyError(f"unknown parameter(s) for {model}: {sorted(unknown)}")
    for key in ("a", "b"):
        if key in data:
            data[key] = _from_json_complex(data[key])
    return cls(**data)
