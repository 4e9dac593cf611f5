"""Certificates for the local error-cancellation algebra and for H|Psi> = 0."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .core import Lattice, apply_sum, two_site_embed
from .models import ErrorTensorSet, LocalTerm

__all__ = [
    "Residual",
    "GlobalCheck",
    "Convention",
    "ConventionResult",
    "SATISFIED",
    "SUSPICIOUS",
    "bond_product",
    "contract_2d",
    "link_lhs_1d",
    "check_link_1d",
    "solve_E_given_A",
    "check_node_cancellation",
    "check_link_2d",
    "frustration_free_residual",
    "convention_search",
    "hamiltonian_terms",
    "global_zero_check",
    "SingleSiteOp",
]

SATISFIED = 1e-9
SUSPICIOUS = 1e-6


@dataclass(frozen=True)
class Residual:
    absolute: float
    relative: float

    def __post_init__(self):
        if not (np.isfinite(self.absolute) and np.isfinite(self.relative)):
            raise ValueError("residual is not finite")

    @property
    def status(self) -> str:
        if self.relative <= SATISFIED:
            return "satisfied"
        if self.relative <= SUSPICIOUS:
            return "suspicious"
        return "violated"

    def passes(self, tol: float = SATISFIED) -> bool:
        return self.relative <= tol


def _residual(diff: np.ndarray, scale: float) -> Residual:
    ab = float(np.linalg.norm(diff))
    return Residual(ab, ab / scale if scale > 0 else ab)


def _check_1d_shapes(h: LocalTerm, *tensors: np.ndarray) -> None:
    shapes = {t.shape for t in tensors}
    if len(shapes) != 1:
        raise ValueError(f"tensor shapes differ: {sorted(shapes)}")
    d, chi, chi2 = tensors[0].shape
    if chi != chi2:
        raise ValueError("bond matrices must be square")
    if h.matrix.shape != (d * d, d * d):
        raise ValueError(f"h is {h.matrix.shape}, tensors have d={d}")


def bond_product(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """(X o Y)^{s t} = X^s Y^t, shape (d, d, chi, chi)."""
    return np.einsum("sab,tbc->stac", X, Y)


def _apply_h(h: np.ndarray, T: np.ndarray) -> np.ndarray:
    d = T.shape[0]
    return (h @ T.reshape(d * d, -1)).reshape(T.shape)


def link_lhs_1d(h: LocalTerm, A: np.ndarray) -> np.ndarray:
    return _apply_h(h.matrix, bond_product(A, A))


def check_link_1d(h: LocalTerm, A: np.ndarray, E: np.ndarray) -> Residual:
    """Residual of h (A o A) - (E o A - A o E)."""
    _check_1d_shapes(h, A, E)
    diff = link_lhs_1d(h, A) - (bond_product(E, A) - bond_product(A, E))
    return _residual(diff, h.norm * np.linalg.norm(A) ** 2)


def _commutator_matrix(A: np.ndarray) -> np.ndarray:
    """Matrix of the linear map E -> E o A - A o E acting on flattened E."""
    d, chi, _ = A.shape
    basis = np.eye(d * chi * chi, dtype=complex).reshape(-1, d, chi, chi)
    cols = np.einsum("ksab,tbc->kstac", basis, A) - np.einsum("sab,ktbc->kstac", A, basis)
    return cols.reshape(d * chi * chi, -1).T


def solve_E_given_A(h: LocalTerm, A: np.ndarray) -> tuple[np.ndarray, Residual]:
    """Least-squares E for fixed A, with the component along A removed.

    E enters the link equation linearly and E -> E + lam A leaves it unchanged,
    so the minimum-norm solution is projected orthogonal to A.
    """
    _check_1d_shapes(h, A)
    M = _commutator_matrix(A)
    target = link_lhs_1d(h, A).ravel()
    x, *_ = np.linalg.lstsq(M, target, rcond=None)
    E = x.reshape(A.shape)
    E = E - np.vdot(A, E) / np.vdot(A, A) * A
    return E, check_link_1d(h, A, E)


def check_node_cancellation(E: ErrorTensorSet, required: tuple[str, ...] | None = None) -> Residual:
    """Norm of the signed slot sum; relative to the largest slot norm."""
    if required is not None:
        missing = [k for k in required if k not in E.slots]
        if missing:
            raise KeyError(f"missing slot(s): {missing}")
    if not E.slots:
        raise KeyError("no slots populated")
    total = E.signed_sum()
    scale = max(np.linalg.norm(v) for v in E.slots.values())
    return _residual(total, scale)


def contract_2d(X: np.ndarray, Y: np.ndarray, direction: str) -> np.ndarray:
    """Two-site 2D product with X on the tail and Y on the head of an edge.

    ``x`` contracts b_x of X with a_x of Y, ``y`` contracts b_y of X with a_y of Y.
    The result has shape (d, d, *open legs).
    """
    if direction == "x":
        return np.einsum("siajb,tackd->stijbckd", X, Y)
    if direction == "y":
        return np.einsum("sijak,tlmkc->stijalmc", X, Y)
    raise ValueError(f"direction must be 'x' or 'y', got {direction!r}")


def _check_2d_shapes(h: LocalTerm, *tensors: np.ndarray) -> None:
    shapes = {t.shape for t in tensors}
    if len(shapes) != 1:
        raise ValueError(f"tensor shapes differ: {sorted(shapes)}")
    shape = tensors[0].shape
    if len(shape) != 5 or len(set(shape[1:])) != 1:
        raise ValueError(f"2D tensors need shape (d, chi, chi, chi, chi), got {shape}")
    d = shape[0]
    if h.matrix.shape != (d * d, d * d):
        raise ValueError(f"h is {h.matrix.shape}, tensors have d={d}")


def check_link_2d(
    h: LocalTerm,
    A: np.ndarray,
    E_pair: tuple[np.ndarray, np.ndarray],
    direction: str,
    signs: tuple[int, int] = (1, 1),
) -> Residual:
    """Residual of h (A o A) - (s1 E_tail o A + s2 A o E_head) along one direction."""
    e_tail, e_head = E_pair
    _check_2d_shapes(h, A, e_tail, e_head)
    lhs = _apply_h(h.matrix, contract_2d(A, A, direction))
    rhs = signs[0] * contract_2d(e_tail, A, direction) + signs[1] * contract_2d(A, e_head, direction)
    return _residual(lhs - rhs, h.norm * np.linalg.norm(A) ** 2)


def frustration_free_residual(h: LocalTerm, A: np.ndarray, direction: str) -> Residual:
    zero = np.zeros_like(A)
    return check_link_2d(h, A, (zero, zero), direction)


ROLES = ("x_tail", "x_head", "y_tail", "y_head")


@dataclass(frozen=True)
class Convention:
    """Which error slot sits on which end of which bond, and with what sign."""

    placement: tuple[str, str, str, str]  # slot names for ROLES
    signs: tuple[int, int, int, int]

    def as_dict(self) -> dict:
        return {
            role: {"slot": slot, "sign": sign}
            for role, slot, sign in zip(ROLES, self.placement, self.signs)
        }


@dataclass
class ConventionResult:
    convention: Convention
    link: dict[str, Residual]
    node: Residual
    success: bool
    tolerance: float
    candidates_tried: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def max_link(self) -> float:
        return max(r.relative for r in self.link.values())


def convention_search(
    h: LocalTerm, A: np.ndarray, E_set: ErrorTensorSet, tol: float = 1e-10
) -> ConventionResult:
    """Exhaustive search over slot placements and slot signs.

    Every permutation of the four published slots over the roles (x tail,
    x head, y tail, y head) is tried together with every sign assignment. An
    assignment is admissible when the signed node sum vanishes; among those
    the smallest maximal link residual wins. All admissible assignments within
    ``tol`` count as ties, broken by the placement order and then the sign
    pattern read as a string of '+' and '-'.
    """
    names = sorted(E_set.slots)
    if len(names) != 4:
        raise KeyError(f"need four error slots, got {names}")
    A_norm = np.linalg.norm(A)
    scale = h.norm * A_norm**2
    lhs = {dr: _apply_h(h.matrix, contract_2d(A, A, dr)) for dr in "xy"}
    tails = {(dr, n): contract_2d(E_set.slots[n], A, dr) for dr in "xy" for n in names}
    heads = {(dr, n): contract_2d(A, E_set.slots[n], dr) for dr in "xy" for n in names}
    node_scale = max(np.linalg.norm(v) for v in E_set.slots.values())

    scored = []
    for perm in itertools.permutations(names):
        for signs in itertools.product((1, -1), repeat=4):
            slot_sign = dict(zip(perm, signs))
            node_vec = sum(slot_sign[n] * E_set.slots[n] for n in names)
            node = _residual(node_vec, node_scale)
            if node.relative > 1e-12:
                continue
            link = {}
            for dr, (t_name, h_name), (st, sh) in (
                ("x", perm[0:2], signs[0:2]),
                ("y", perm[2:4], signs[2:4]),
            ):
                diff = lhs[dr] - (st * tails[dr, t_name] + sh * heads[dr, h_name])
                link[dr] = _residual(diff, scale)
            worst = max(r.relative for r in link.values())
            sign_str = "".join("+" if s > 0 else "-" for s in signs)
            scored.append((worst, perm, sign_str, Convention(perm, signs), link, node))

    n_tried = 24 * 16
    if not scored:
        conv = Convention(tuple(names), (1, 1, 1, 1))
        link = {dr: _residual(lhs[dr], scale) for dr in "xy"}
        res = ConventionResult(conv, link, check_node_cancellation(E_set), False, tol, n_tried)
        res.notes.append("no sign assignment cancels the node sum")
        return res

    best_worst = min(s[0] for s in scored)
    if best_worst <= tol:
        ties = [s for s in scored if s[0] <= tol]
        ties.sort(key=lambda s: (s[1], s[2]))
    else:
        ties = sorted(scored, key=lambda s: (s[0], s[1], s[2]))
    worst, _, _, conv, link, node = ties[0]
    ok = worst <= tol
    res = ConventionResult(conv, link, node, ok, tol, n_tried)
    if not ok:
        res.notes.append(f"best max link residual {worst:.3e} exceeds tolerance {tol:.1e}")
    return res


def hamiltonian_terms(
    h: LocalTerm,
    lattice: Lattice,
    boundary_terms: list[tuple[int, np.ndarray]] | None = None,
) -> list:
    """Matrix-free terms of H = sum_edges h + sum of single-site boundary terms."""
    d = h.d
    terms: list = [two_site_embed(h.matrix, (i, j), lattice, d) for i, j, _ in lattice.edges]
    for site, op in boundary_terms or []:
        terms.append(SingleSiteOp(np.asarray(op, dtype=complex), site, lattice.n_sites, d))
    return terms


@dataclass(frozen=True)
class SingleSiteOp:
    op: np.ndarray
    i: int
    n_sites: int
    d: int

    def apply(self, psi: np.ndarray) -> np.ndarray:
        t = psi.reshape((self.d,) * self.n_sites + psi.shape[1:])
        out = np.tensordot(self.op, t, axes=([1], [self.i]))
        return np.moveaxis(out, 0, self.i).reshape(psi.shape)


@dataclass(frozen=True)
class GlobalCheck:
    residual: float  # ||H psi - E psi|| / ||psi||
    zero_residual: float  # ||H psi|| / ||psi||
    energy: complex
    norm: float

    def passes(self, tol: float = SATISFIED, expect_zero: bool = True) -> bool:
        r = self.zero_residual if expect_zero else self.residual
        return r <= tol


def global_zero_check(
    h: LocalTerm,
    lattice: Lattice,
    psi: np.ndarray,
    boundary_terms: list[tuple[int, np.ndarray]] | None = None,
) -> GlobalCheck:
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.size != h.d**lattice.n_sites:
        raise ValueError(f"state has {psi.size} amplitudes, expected {h.d ** lattice.n_sites}")
    nrm = float(np.linalg.norm(psi))
    if nrm == 0:
        raise ValueError("zero state")
    hpsi = apply_sum(hamiltonian_terms(h, lattice, boundary_terms), psi)
    energy = complex(np.vdot(psi, hpsi) / nrm**2)
    return GlobalCheck(
        residual=float(np.linalg.norm(hpsi - energy * psi) / nrm),
        zero_residual=float(np.linalg.norm(hpsi) / nrm),
        energy=energy,
        norm=nrm,
    )

