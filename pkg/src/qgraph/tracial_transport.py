"""Comparing a quantum graph over (B, φ) with the tracial graph of the same e.

Bimodules of B(L²(B)) over B′ are described by their left-factor data: a
subspace S⁰ of N×N matrices that splits along block pairs (the (i,j) corner
holds maps ℂ^{n_j} → ℂ^{n_i}).  The transport formulas only touch that
factor:  S_φ = S_Tr Q^{1/2} and T_φ = Q^{1/4} S_Tr Q^{1/4}.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Algebra
from .errors import NotBimodule
from .linalg_core import fro, generated_algebra_dim, projector, span_basis
from .quantum_graph import OperatorSubspace, choi_min_eig


class MatrixSubspace:
    """Subspace of M_N with the Hilbert-Schmidt pairing (orthonormal columns)."""

    def __init__(self, n: int, cols):
        self.n = n
        self.cols = np.asarray(cols, dtype=complex).reshape(n * n, -1)

    @classmethod
    def span(cls, mats, n=None, tol=None):
        mats = [np.asarray(m, dtype=complex) for m in mats]
        if n is None:
            n = mats[0].shape[0]
        if not mats:
            return cls(n, np.zeros((n * n, 0)))
        from .linalg_core import DEFAULT_TOL
        return cls(n, span_basis(np.array([m.reshape(-1) for m in mats]), tol or DEFAULT_TOL))

    @property
    def dim(self):
        return self.cols.shape[1]

    @property
    def basis(self):
        return [self.cols[:, k].reshape(self.n, self.n) for k in range(self.dim)]

    @property
    def projection(self):
        return projector(self.cols)

    def residual(self, X) -> float:
        v = np.asarray(X, dtype=complex).reshape(-1)
        return float(np.linalg.norm(v - self.cols @ (self.cols.conj().T @ v)))

    def dist(self, other) -> float:
        return fro(self.projection - other.projection)

    def map(self, f):
        return MatrixSubspace.span([f(x) for x in self.basis], self.n)

    def adjoint(self):
        return self.map(lambda x: x.conj().T)


def _corner_masks(alg: Algebra):
    out = []
    for i, ni in enumerate(alg.blocks):
        for j, nj in enumerate(alg.blocks):
            m = np.zeros((alg.N, alg.N))
            oi, oj = alg.offsets[i], alg.offsets[j]
            m[oi:oi + ni, oj:oj + nj] = 1.0
            out.append(m)
    return out


def bimodule_residual(alg: Algebra, S: MatrixSubspace) -> float:
    """How far S⁰ is from splitting along block pairs."""
    if S.n != alg.N:
        return np.inf
    return max((S.residual(m * X) for m in _corner_masks(alg) for X in S.basis), default=0.0)


def check_bimodule(alg: Algebra, S: MatrixSubspace):
    r = bimodule_residual(alg, S)
    if r > alg.tol.rank_tol:
        raise NotBimodule(f"left-factor data does not split along block pairs (residual {r:.3e})")


def bimodule_from_left(alg: Algebra, S: MatrixSubspace) -> OperatorSubspace:
    """The full bimodule ⊕ S⁰_{ij} ⊗ B(ℂ^{n_j}, ℂ^{n_i}) in B(L²(B))."""
    check_bimodule(alg, S)
    d = alg.dim
    ops = []
    for X in S.basis:
        for i, ni in enumerate(alg.blocks):
            for j, nj in enumerate(alg.blocks):
                oi, oj = alg.offsets[i], alg.offsets[j]
                corner = X[oi:oi + ni, oj:oj + nj]
                if fro(corner) == 0:
                    continue
                si, sj = alg.voffsets[i], alg.voffsets[j]
                for b in range(ni):
                    for c in range(nj):
                        w = np.zeros((ni, nj))
                        w[b, c] = 1.0
                        op = np.zeros((d, d), dtype=complex)
                        op[si:si + ni * ni, sj:sj + nj * nj] = np.kron(corner, w)
                        ops.append(op)
    return OperatorSubspace.span(alg, ops)


def left_data(S: OperatorSubspace) -> MatrixSubspace:
    """Inverse of bimodule_from_left: assemble the block-pair left factors into M_N."""
    from .relation_space import block_decompose_operators
    alg = S.parent
    fam = block_decompose_operators(alg, S.basis)
    mats = []
    for (i, j), vs in fam.items.items():
        oi, oj = alg.offsets[i], alg.offsets[j]
        for v in vs:
            X = np.zeros((alg.N, alg.N), dtype=complex)
            X[oi:oi + v.shape[0], oj:oj + v.shape[1]] = v
            mats.append(X)
    return MatrixSubspace.span(mats, alg.N)


# ---------------------------------------------------------------------------

def _sandwich_hom(alg: Algebra, s: float) -> np.ndarray:
    """Hom matrix of x ↦ Q^s x Q^s."""
    out = np.zeros((alg.dim, alg.dim), dtype=complex)
    for q, o, n in zip(alg.qpow_blocks(s), alg.voffsets, alg.blocks):
        out[o:o + n * n, o:o + n * n] = np.kron(q, q.T)
    return out


def transport_adjacency(alg: Algebra, H_tr: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Hom matrix of x ↦ A_Tr(Q^{1/2} x Q^{1/2}) (or the inverse substitution)."""
    return np.asarray(H_tr) @ _sandwich_hom(alg, -0.5 if inverse else 0.5)


def tracial_reference(alg: Algebra) -> Algebra:
    return Algebra(alg.blocks, None, alg.tol)


def transport_bimodule(alg: Algebra, S_tr: MatrixSubspace, which: str = "S", inverse: bool = False) -> MatrixSubspace:
    check_bimodule(alg, S_tr)
    if which == "S":
        r = alg.qpow(-0.5 if inverse else 0.5)
        return S_tr.map(lambda x: x @ r)
    if which == "T":
        q = alg.qpow(-0.25 if inverse else 0.25)
        return S_tr.map(lambda x: q @ x @ q)
    raise ValueError("which must be 'S' or 'T'")


@dataclass
class TransportReport:
    reflexive_phi: bool
    reflexive_tr: bool
    reflexive_residuals: tuple
    selfadj_S_phi: bool
    selfadj_S_tr: bool
    selfadj_S_residuals: tuple
    selfadj_T_phi: bool
    selfadj_T_tr: bool
    selfadj_T_residuals: tuple

    @property
    def agree(self) -> bool:
        return (self.reflexive_phi == self.reflexive_tr and self.selfadj_S_phi == self.selfadj_S_tr
                and self.selfadj_T_phi == self.selfadj_T_tr)

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["agree"] = self.agree
        return d


def property_trio(alg: Algebra, S_tr: MatrixSubspace, tol: float = 1e-8) -> TransportReport:
    S_phi = transport_bimodule(alg, S_tr, "S")
    T_phi = transport_bimodule(alg, S_tr, "T")
    one = np.eye(alg.N)
    r1a = S_phi.residual(one) / np.sqrt(alg.N)
    qm = alg.qpow(-0.5)
    r1b = S_tr.residual(qm) / max(1.0, fro(qm))
    r2a = S_phi.adjoint().dist(S_phi)
    r2b = S_tr.adjoint().dist(S_tr.map(lambda x: qm @ x @ alg.qpow(0.5)))
    r3a = T_phi.adjoint().dist(T_phi)
    r3b = S_tr.adjoint().dist(S_tr)
    return TransportReport(bool(r1a <= tol), bool(r1b <= tol), (float(r1a), float(r1b)),
                           bool(r2a <= tol), bool(r2b <= tol), (float(r2a), float(r2b)),
                           bool(r3a <= tol), bool(r3b <= tol), (float(r3a), float(r3b)))


def cp_both_ways(alg: Algebra, H_tr: np.ndarray, tol: float = 1e-8):
    """(A_Tr is CP, A_φ is CP), decided on the tracial and the φ side respectively."""
    ref = tracial_reference(alg)
    lo_tr, sc_tr = choi_min_eig(H_tr, ref)
    H_phi = transport_adjacency(alg, H_tr)
    lo_phi, sc_phi = choi_min_eig(H_phi, alg)
    return lo_tr >= -tol * (1 + sc_tr), lo_phi >= -tol * (1 + sc_phi)


# ---------------------------------------------------------------------------
# irreducibility

def _generators(T):
    if isinstance(T, (OperatorSubspace, MatrixSubspace)):
        return T.basis
    return [np.asarray(x, dtype=complex) for x in T]


def is_irreducible(T, tol=None) -> bool:
    gens = _generators(T)
    if not gens:
        return False
    d = gens[0].shape[0]
    from .linalg_core import DEFAULT_TOL
    return generated_algebra_dim(gens, tol or DEFAULT_TOL) == d * d


def common_eigenvector(gens, tol: float = 1e-8, seed: int = 0):
    """A vector v with X v ∥ v for every generator, or None."""
    found = common_eigenvectors(gens, tol, seed)
    return found[0] if found else None


def common_eigenvectors(gens, tol: float = 1e-8, seed: int = 0) -> list:
    """Unit vectors v with X v ∥ v for every generator (one per candidate direction found).

    Candidates are eigenvectors of a random combination; degenerate eigenspaces
    are refined with a second combination compressed onto them.
    """
    gens = [np.asarray(g, dtype=complex) for g in gens]
    d = gens[0].shape[0]
    rng = np.random.default_rng(seed)

    def combo():
        c = rng.normal(size=len(gens)) + 1j * rng.normal(size=len(gens))
        return sum(ci * g for ci, g in zip(c, gens))

    def is_common(v):
        v = v / np.linalg.norm(v)
        return all(np.linalg.norm(g @ v - (np.vdot(v, g @ v)) * v) <= tol * max(1.0, fro(g)) for g in gens)

    Z = combo()
    w, U = np.linalg.eig(Z)
    cands = []
    used = np.zeros(d, dtype=bool)
    for k in range(d):
        if used[k]:
            continue
        group = np.where(np.abs(w - w[k]) <= 1e-6 * max(1.0, np.abs(w).max()))[0]
        used[group] = True
        if len(group) == 1:
            cands.append(U[:, k])
            continue
        # eigenspace of Z for this eigenvalue (not the span of possibly defective columns)
        K = np.linalg.svd(Z - w[k] * np.eye(d))[2][-len(group):].conj().T
        Kq, _ = np.linalg.qr(K)
        W = combo()
        _, u2 = np.linalg.eig(Kq.conj().T @ W @ Kq)
        cands.extend((Kq @ u2).T)
    return [v / np.linalg.norm(v) for v in cands if is_common(v)]


def has_invariant_subspace(gens, tol: float = 1e-8) -> bool:
    """Brute-force reducibility test for d ≤ 3.

    For d ≤ 3 a proper invariant subspace has dimension 1 or d−1, and the
    orthogonal complement of a (d−1)-dimensional invariant subspace is a
    common eigenvector of the adjoints.
    """
    gens = _generators(gens)
    d = gens[0].shape[0]
    if d > 3:
        raise ValueError("brute-force search is only implemented for d <= 3")
    if d == 1:
        return False
    if common_eigenvector(gens, tol) is not None:
        return True
    return common_eigenvector([g.conj().T for g in gens], tol) is not None
