"""Projections e ∈ B⊗B^op as subspaces V of HS(L²(B)) ≅ L²(B)⊗conj(L²(B)).

e acts on Hilbert-Schmidt operators X by b⊗c^op : X ↦ L_b X L_c, which is a
faithful *-representation of B⊗B^op.  Its commutant is generated by
X ↦ R_c X R_d, i.e. by B′ acting on both sides.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Tuple

import numpy as np

from .algebra import Algebra, AlgebraElement, TensorElement
from .errors import GramNotIdentity, NotInvariant, NotProjection, ShapeMismatch
from .linalg_core import fro, projector, span_basis
from .quantum_graph import OperatorSubspace, SuperOperator


def _unit_left_ops(alg: Algebra) -> list:
    return [alg.left_op(E) for E in alg.matrix_units]


def natural_action(e: TensorElement) -> np.ndarray:
    """Π_e = Σ C[p,q] kron(L_{E_p}, L_{E_q}^T) on row-major flattened operators."""
    alg = e.parent
    C = e.coeff()
    Ls = _unit_left_ops(alg)
    d = alg.dim
    out = np.zeros((d * d, d * d), dtype=complex)
    for p, q in zip(*np.nonzero(np.abs(C) > 0)):
        out += C[p, q] * np.kron(Ls[p], Ls[q].T)
    return out


class HsSubspace:
    """Subspace of HS(L²(B)); ``cols`` are orthonormal flattened operators."""

    def __init__(self, parent: Algebra, cols):
        d = parent.dim
        self.parent = parent
        self.cols = np.asarray(cols, dtype=complex).reshape(d * d, -1)

    @classmethod
    def span(cls, parent, operators):
        d = parent.dim
        ops = [np.asarray(o, dtype=complex).reshape(-1) for o in operators]
        if not ops:
            return cls(parent, np.zeros((d * d, 0), dtype=complex))
        return cls(parent, span_basis(np.array(ops), parent.tol))

    @property
    def dim(self) -> int:
        return self.cols.shape[1]

    @property
    def basis(self) -> list:
        d = self.parent.dim
        return [self.cols[:, k].reshape(d, d) for k in range(self.dim)]

    @cached_property
    def projection(self) -> np.ndarray:
        return projector(self.cols)

    def invariance_residual(self) -> float:
        alg = self.parent
        P = self.projection
        d = alg.dim
        r = 0.0
        eye = np.eye(d)
        for E in alg.matrix_units:
            R = alg.right_op(E)
            for G in (np.kron(R, eye), np.kron(eye, R.T)):
                r = max(r, fro(G @ P - P @ G))
        return r

    @property
    def invariant(self) -> bool:
        return self.invariance_residual() <= self.parent.tol.rank_tol * max(1.0, self.dim)

    def dist(self, other) -> float:
        return fro(self.projection - other.projection)


def image_V(e: TensorElement) -> HsSubspace:
    alg = e.parent
    res = e.projection_residual()
    if res > alg.tol.rank_tol * max(1.0, e.norm()):
        raise NotProjection(f"e is not a self-adjoint idempotent (residual {res:.3e})")
    Pi = natural_action(e)
    w, u = np.linalg.eigh(0.5 * (Pi + Pi.conj().T))
    return HsSubspace(alg, u[:, w > 0.5])


def subspace_to_e(V: HsSubspace) -> TensorElement:
    alg = V.parent
    if not V.invariant:
        raise NotInvariant("subspace is not invariant under B′ acting on both sides")
    P = V.projection
    Ls = _unit_left_ops(alg)
    d = alg.dim
    sizes = [alg.blocks[alg.block_of_index(p)[0]] for p in range(d)]
    C = np.zeros((d, d), dtype=complex)
    for p in range(d):
        for q in range(d):
            G = np.kron(Ls[p], Ls[q].T)
            C[p, q] = np.vdot(G, P) / (sizes[p] * sizes[q])
    e = TensorElement.from_coeff(alg, C)
    if fro(natural_action(e) - P) > alg.tol.rank_tol * max(1.0, V.dim):
        raise NotInvariant("projection is not in the image of B⊗B^op")
    return e


def S_from_V(V: HsSubspace) -> OperatorSubspace:
    """{X : X c′ ∇^{-1/2} ∈ V for every c′ ∈ B′}, computed as a kernel."""
    alg = V.parent
    if not V.invariant:
        raise NotInvariant("subspace is not invariant under B′ acting on both sides")
    d = alg.dim
    comp = np.eye(d * d) - V.projection
    nab = alg.nabla_op(-0.5)
    eye = np.eye(d)
    rows = []
    for E in alg.matrix_units:
        M = alg.right_op(E) @ nab
        rows.append(comp @ np.kron(eye, M.T))
    from .linalg_core import null_space
    K = null_space(np.vstack(rows), alg.tol)
    return OperatorSubspace(alg, K)


def V_from_S(S: OperatorSubspace) -> HsSubspace:
    """Inverse of S_from_V: V = S ∇^{-1/2}."""
    alg = S.parent
    nab = alg.nabla_op(-0.5)
    return HsSubspace.span(alg, [X @ nab for X in S.basis])


# ---------------------------------------------------------------------------
# degree

@dataclass
class Degree:
    elem: AlgebraElement
    norm: float


def degree(e: TensorElement) -> Degree:
    """(id⊗φ^op)(e) and its operator norm."""
    alg = e.parent
    out = []
    for i, ni in enumerate(alg.blocks):
        acc = np.zeros((ni, ni), dtype=complex)
        for j, nj in enumerate(alg.blocks):
            c = e.comps.get((i, j))
            if c is None:
                continue
            # φ(c) = Tr(Q_j c) = Tr(Q_j^T c^T) on the transposed leg
            c4 = c.reshape(ni, nj, ni, nj)
            acc += np.einsum("anbm,mn->ab", c4, alg.Q_blocks[j].T)
        out.append(acc)
    elem = AlgebraElement(alg, alg.join(out))
    return Degree(elem, float(np.linalg.norm(elem.mat, 2)))


def degree_bruteforce(e: TensorElement) -> np.ndarray:
    alg = e.parent
    C = e.coeff()
    units = alg.matrix_units
    phis = np.array([np.trace(alg.Q @ E) for E in units])
    return sum(units[p] * (C[p] @ phis) for p in range(alg.dim))


# ---------------------------------------------------------------------------
# block structure

@dataclass
class BlockFamily:
    """(i, j) ↦ list of n_i×n_j matrices."""
    blocks: Tuple[int, ...]
    items: Dict[Tuple[int, int], List[np.ndarray]] = field(default_factory=dict)

    def __post_init__(self):
        for (i, j), mats in self.items.items():
            for m in mats:
                if np.shape(m) != (self.blocks[i], self.blocks[j]):
                    raise ShapeMismatch(f"block {(i, j)} expects {(self.blocks[i], self.blocks[j])}")

    def get(self, i, j) -> List[np.ndarray]:
        return self.items.get((i, j), [])

    def pairs(self):
        r = range(len(self.blocks))
        return [(i, j) for i in r for j in r]

    def count(self) -> int:
        return sum(len(v) for v in self.items.values())


def block_decompose_operators(alg: Algebra, operators) -> BlockFamily:
    """Left-factor data of a B′-bimodule of operators on L²(B).

    The (i,j) corner of such an operator is a sum of kron(v, w) with v in the
    left-factor space V⁰_{ij} ⊆ B(ℂ^{n_j}, ℂ^{n_i}); reshuffling each corner so
    that row index is (a, c) and column index is (b, d) puts V⁰ in the column span.
    """
    items = {}
    for i, ni in enumerate(alg.blocks):
        si = alg.voffsets[i]
        for j, nj in enumerate(alg.blocks):
            sj = alg.voffsets[j]
            cols = []
            for X in operators:
                corner = X[si:si + ni * ni, sj:sj + nj * nj].reshape(ni, ni, nj, nj)  # [a,b,c,d]
                R = corner.transpose(0, 2, 1, 3).reshape(ni * nj, ni * nj)
                cols.append(R.T)
            if cols:
                basis = span_basis(np.vstack(cols), alg.tol)
            else:
                basis = np.zeros((ni * nj, 0))
            items[(i, j)] = [basis[:, k].reshape(ni, nj) for k in range(basis.shape[1])]
    return BlockFamily(alg.blocks, items)


def block_decompose(V: HsSubspace) -> BlockFamily:
    if not V.invariant:
        raise NotInvariant("subspace is not invariant under B′ acting on both sides")
    return block_decompose_operators(V.parent, V.basis)


def block_family_from_e(e: TensorElement) -> BlockFamily:
    """V⁰_{ij} as the range of comp(i, j) (cross-check route)."""
    alg = e.parent
    items = {}
    for i, ni in enumerate(alg.blocks):
        for j, nj in enumerate(alg.blocks):
            c = e.comp(i, j)
            w, u = np.linalg.eigh(0.5 * (c + c.conj().T))
            cols = u[:, w > 0.5]
            items[(i, j)] = [cols[:, k].reshape(ni, nj) for k in range(cols.shape[1])]
    return BlockFamily(alg.blocks, items)


def reassemble(alg: Algebra, fam: BlockFamily) -> np.ndarray:
    """Projection onto ⊕_{ij} V⁰_{ij} ⊗ B(ℂ^{n_j}, ℂ^{n_i}) (assumes orthonormal V⁰ bases)."""
    d = alg.dim
    cols = []
    for (i, j), mats in fam.items.items():
        ni, nj = alg.blocks[i], alg.blocks[j]
        si, sj = alg.voffsets[i], alg.voffsets[j]
        for v in mats:
            for b in range(ni):
                for dd in range(nj):
                    w = np.zeros((ni, nj))
                    w[b, dd] = 1.0
                    X = np.zeros((d, d), dtype=complex)
                    X[si:si + ni * ni, sj:sj + nj * nj] = np.kron(v, w)
                    cols.append(X.reshape(-1))
    if not cols:
        return np.zeros((d * d, d * d), dtype=complex)
    B = np.array(cols).T
    return projector(B)


def family_projection(fam: BlockFamily, i: int, j: int) -> np.ndarray:
    """Projection onto span of block (i,j) in vec coordinates (orthonormalizes first)."""
    mats = fam.get(i, j)
    ni, nj = fam.blocks[i], fam.blocks[j]
    if not mats:
        return np.zeros((ni * nj, ni * nj), dtype=complex)
    B = span_basis(np.array([m.reshape(-1) for m in mats]))
    return projector(B)


def family_dist(f1: BlockFamily, f2: BlockFamily) -> float:
    return max(fro(family_projection(f1, i, j) - family_projection(f2, i, j)) for i, j in f1.pairs())


def map_family(fam: BlockFamily, f) -> BlockFamily:
    return BlockFamily(fam.blocks, {k: [f(k[0], k[1], m) for m in v] for k, v in fam.items.items()})


# ---------------------------------------------------------------------------
# Kraus data

def orthogonal_kraus_basis(V: HsSubspace) -> BlockFamily:
    """β_k = v_k Q_j^{1/2} for an HS-orthonormal basis (v_k) of V⁰_{ij}."""
    alg = V.parent
    fam = block_decompose(V)
    half = alg.qpow_blocks(0.5)
    return map_family(fam, lambda i, j, v: v @ half[j])


def kraus_gram(alg: Algebra, fam: BlockFamily, i: int, j: int) -> np.ndarray:
    """Gram matrix Tr(Q_j^{-1} β_k* β_l)."""
    qinv = alg.qpow_blocks(-1.0)[j]
    mats = fam.get(i, j)
    return np.array([[np.trace(qinv @ a.conj().T @ b) for b in mats] for a in mats])


def kraus_hom(alg: Algebra, fam: BlockFamily) -> np.ndarray:
    """Hom-level matrix of x ↦ (Σ_{j,k} β^{(i,j)}_k x_j β^{(i,j)*}_k)_i."""
    H = np.zeros((alg.dim, alg.dim), dtype=complex)
    for (i, j), mats in fam.items.items():
        si, sj = alg.voffsets[i], alg.voffsets[j]
        ni, nj = alg.blocks[i], alg.blocks[j]
        for b in mats:
            H[si:si + ni * ni, sj:sj + nj * nj] += np.kron(b, b.conj())
    return H


def kraus_adjacency(fam: BlockFamily, alg: Algebra) -> SuperOperator:
    if tuple(fam.blocks) != alg.blocks:
        raise ShapeMismatch("block family does not match the algebra")
    return SuperOperator.from_hom(alg, kraus_hom(alg, fam))


def wasilewski_normal_form(fam: BlockFamily, alg: Algebra, tol: float = 1e-10) -> BlockFamily:
    """X_k = Q_i^{1/4} β_k Q_j^{-1/4}, with Gram Tr(X_k* Q_i^{-1/2} X_l Q_j^{-1/2}) = δ checked."""
    q4, qm4 = alg.qpow_blocks(0.25), alg.qpow_blocks(-0.25)
    qm2 = alg.qpow_blocks(-0.5)
    out = map_family(fam, lambda i, j, b: q4[i] @ b @ qm4[j])
    for (i, j), mats in out.items.items():
        if not mats:
            continue
        G = np.array([[np.trace(a.conj().T @ qm2[i] @ b @ qm2[j]) for b in mats] for a in mats])
        r = float(np.abs(G - np.eye(len(mats))).max())
        if r > tol:
            raise GramNotIdentity(f"block {(i, j)}: Gram residual {r:.3e}")
    return out


def wasilewski_hom(alg: Algebra, X: BlockFamily) -> np.ndarray:
    """Hom matrix of x ↦ Σ Q_i^{-1/4} X_k Q_j^{1/4} x Q_j^{1/4} X_k* Q_i^{-1/4}."""
    q4, qm4 = alg.qpow_blocks(0.25), alg.qpow_blocks(-0.25)
    return kraus_hom(alg, map_family(X, lambda i, j, x: qm4[i] @ x @ q4[j]))
