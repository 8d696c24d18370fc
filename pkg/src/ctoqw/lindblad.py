"""Generator of the open quantum walk on a graph.

The generator acting on a density matrix is

    L(rho) = i[rho, H] + sum_B ( B rho B^dagger - 1/2 {B^dagger B, rho} )

with ``H`` the graph Laplacian and one swap operator
``B_jk = sqrt(M_jk) |j><k|`` per ordered edge. The Hamiltonian sign is
``i[rho, H]``, equivalent to the more common ``-i[H, rho]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .graph import Graph, GraphError, laplacian, transition_matrix
from .numerics import complex_to_json, expm, null_space, unvec, vec


class SwapOperator(NamedTuple):
    """``coeff * |j><k|``."""

    j: int
    k: int
    coeff: float

    def matrix(self, n: int) -> np.ndarray:
        b = np.zeros((n, n), dtype=complex)
        b[self.j, self.k] = self.coeff
        return b


@dataclass(frozen=True)
class LindbladSet:
    dim: int
    ops: tuple[SwapOperator, ...] = ()

    def __post_init__(self) -> None:
        ops = tuple(SwapOperator(int(j), int(k), float(c)) for j, k, c in self.ops)
        for op in ops:
            if not (0 <= op.j < self.dim and 0 <= op.k < self.dim):
                raise ValueError(f"operator {op} out of range for dim {self.dim}")
            if not op.coeff > 0:
                raise ValueError(f"operator {op} must have a positive coefficient")
        object.__setattr__(self, "ops", ops)

    def __len__(self) -> int:
        return len(self.ops)

    def matrices(self) -> list[np.ndarray]:
        return [op.matrix(self.dim) for op in self.ops]

    def without(self, index: int) -> LindbladSet:
        return LindbladSet(self.dim, self.ops[:index] + self.ops[index + 1:])


Operators = Union[LindbladSet, Sequence[np.ndarray]]


def build_lindblad_set(g: Graph) -> LindbladSet:
    """One swap operator per ordered edge, ordered by ``(k, j)``."""
    m = transition_matrix(g)
    ops = []
    for k in range(g.n):
        for j in range(g.n):
            if m[j, k] > 0:
                ops.append(SwapOperator(j, k, float(np.sqrt(m[j, k]))))
    return LindbladSet(g.n, tuple(ops))


def apply_generator(h: np.ndarray, ops: Operators, rho: np.ndarray) -> np.ndarray:
    """Evaluate ``L(rho)`` directly from the operator formula.

    A :class:`LindbladSet` is handled through its rank-one structure: the
    jump term of ``c|j><k|`` adds ``c^2 rho_kk`` to entry ``(j, j)`` and the
    anticommutator scales row and column ``k``. A plain sequence of matrices
    is handled term by term.
    """
    h = np.asarray(h)
    rho = np.asarray(rho)
    n = h.shape[0]
    if rho.shape != (n, n) or h.shape != (n, n):
        raise ValueError(f"dimension mismatch: H is {h.shape}, rho is {rho.shape}")
    out = 1j * (rho @ h - h @ rho)
    if isinstance(ops, LindbladSet):
        if ops.dim != n:
            raise ValueError(f"dimension mismatch: operators act on {ops.dim}, rho is {n}x{n}")
        if not ops.ops:
            return out
        js = np.fromiter((op.j for op in ops.ops), dtype=int)
        ks = np.fromiter((op.k for op in ops.ops), dtype=int)
        c2 = np.fromiter((op.coeff for op in ops.ops), dtype=float) ** 2
        gain = np.zeros(n, dtype=complex)
        np.add.at(gain, js, c2 * rho[ks, ks])
        loss = np.zeros(n)
        np.add.at(loss, ks, c2)
        out = out + np.diag(gain) - 0.5 * (loss[:, None] * rho + rho * loss[None, :])
        return out
    for b in ops:
        b = np.asarray(b)
        if b.shape != (n, n):
            raise ValueError(f"dimension mismatch: operator is {b.shape}, rho is {n}x{n}")
        bdb = b.conj().T @ b
        out = out + b @ rho @ b.conj().T - 0.5 * (bdb @ rho + rho @ bdb)
    return out


def liouvillian_matrix(h: np.ndarray, ops: Operators) -> np.ndarray:
    """Column-stacked ``n^2 x n^2`` matrix of the generator."""
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    eye = np.eye(n)
    mats = ops.matrices() if isinstance(ops, LindbladSet) else [np.asarray(b) for b in ops]
    out = 1j * (np.kron(h.T, eye) - np.kron(eye, h))
    for b in mats:
        bdb = b.conj().T @ b
        out += np.kron(b.conj(), b) - 0.5 * (np.kron(eye, bdb) + np.kron(bdb.T, eye))
    return out


@dataclass(frozen=True, eq=False)
class Liouvillian:
    dim: int
    matrix: np.ndarray
    hamiltonian: np.ndarray
    operators: Operators = field(repr=False)
    graph: Graph | None = None

    def apply(self, rho) -> np.ndarray:
        return apply_generator(self.hamiltonian, self.operators, np.asarray(rho))

    def apply_via_matrix(self, rho) -> np.ndarray:
        return unvec(self.matrix @ vec(np.asarray(rho)), self.dim)

    def to_json(self) -> dict:
        return {"dim": self.dim, "convention": "column-stacking",
                "matrix": complex_to_json(self.matrix),
                "hamiltonian": complex_to_json(self.hamiltonian)}


def build_liouvillian(g: Graph) -> Liouvillian:
    lset = build_lindblad_set(g)
    h = laplacian(g).astype(complex)
    return Liouvillian(g.n, liouvillian_matrix(h, lset), h, lset, g)


def liouvillian_from_operators(h: np.ndarray, ops: Sequence[np.ndarray],
                               graph: Graph | None = None) -> Liouvillian:
    """Generator with an arbitrary Hamiltonian and list of Lindblad operators."""
    h = np.asarray(h, dtype=complex)
    ops = tuple(np.asarray(b, dtype=complex) for b in ops)
    return Liouvillian(h.shape[0], liouvillian_matrix(h, ops), h, ops, graph)


@dataclass(frozen=True)
class SumIdentityCheck:
    holds: bool
    deviation: float


def check_sum_identity(lset: LindbladSet, tol: Tolerances = DEFAULT_TOLERANCES) -> SumIdentityCheck:
    total = np.zeros((lset.dim, lset.dim))
    for op in lset.ops:
        # B^dagger B = c^2 |k><k|
        total[op.k, op.k] += op.coeff ** 2
    deviation = float(np.max(np.abs(total - np.eye(lset.dim))))
    return SumIdentityCheck(deviation <= tol.sum_identity, deviation)


@dataclass(frozen=True)
class CommutantCheck:
    dimension: int
    trivial: bool


def commutator_system(ops: Operators, n: int | None = None) -> np.ndarray:
    """Stacked matrix whose null space is ``{X : BX = XB for every B}``."""
    mats = ops.matrices() if isinstance(ops, LindbladSet) else [np.asarray(b) for b in ops]
    if n is None:
        n = ops.dim if isinstance(ops, LindbladSet) else mats[0].shape[0]
    eye = np.eye(n)
    blocks = [np.kron(eye, b) - np.kron(b.T, eye) for b in mats]
    if not blocks:
        return np.zeros((0, n * n), dtype=complex)
    return np.vstack(blocks)


def commutant_dimension(lset: LindbladSet, tol: Tolerances = DEFAULT_TOLERANCES) -> CommutantCheck:
    dim = len(null_space(commutator_system(lset, lset.dim), tol=tol))
    return CommutantCheck(dim, dim == 1)


def check_span_hermitian(lset: LindbladSet) -> bool:
    """True iff every stored ``(j, k)`` has its partner ``(k, j)``."""
    pairs = {(op.j, op.k) for op in lset.ops}
    return all((k, j) in pairs for j, k in pairs)


def build_lindblad_variant(g: Graph, variant: str,
                           subset: Sequence[int] | None = None) -> list[np.ndarray]:
    """Alternative operator pairs: ``{exp(-iL), I}`` or ``{P, I - P}``.

    For ``projection_pair`` the projector ``P`` is onto the span of the
    vertices in ``subset``, which must be nonempty and proper.
    """
    eye = np.eye(g.n, dtype=complex)
    if variant == "unitary_pair":
        return [expm(-1j * laplacian(g)), eye]
    if variant == "projection_pair":
        chosen = sorted(set(subset or ()))
        if not chosen or len(chosen) >= g.n:
            raise GraphError("projection subset must be nonempty and a proper subset of the vertices")
        if chosen[0] < 0 or chosen[-1] >= g.n:
            raise GraphError(f"projection subset {chosen} out of range for n={g.n}")
        p = np.zeros((g.n, g.n), dtype=complex)
        p[chosen, chosen] = 1.0
        return [p, eye - p]
    raise ValueError(f"unknown variant {variant!r}; expected unitary_pair or projection_pair")
