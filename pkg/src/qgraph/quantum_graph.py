"""Quantum adjacency operators on L²(B) and their bimodules.

A ``SuperOperator`` is a dim×dim matrix in the matrix-unit basis of L²(B).  Its
"hom matrix" is the same map transported to B through Λ, i.e. Λ⁻¹ A Λ in the
matrix-unit coordinates of B.  Operators on B(L²(B)) (dim²×dim²) act on
row-major flattenings of dim×dim matrices.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import (Algebra, AlgebraElement, TensorElement, _check_parent,
                      commutant_basis, mult_maps)
from .errors import NotReal
from .linalg_core import fro, projector, span_basis


class SuperOperator:
    def __init__(self, parent: Algebra, matrix):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (parent.dim, parent.dim):
            from .errors import ShapeMismatch
            raise ShapeMismatch(f"superoperator must be {parent.dim}x{parent.dim}")
        self.parent = parent
        self.matrix = matrix

    @classmethod
    def identity(cls, alg):
        return cls(alg, np.eye(alg.dim, dtype=complex))

    @classmethod
    def rank_one(cls, ket: AlgebraElement, bra: AlgebraElement):
        """|Λ(ket)⟩⟨Λ(bra)|."""
        alg = ket.parent
        return cls(alg, np.outer(alg.lam @ alg.vec(ket.mat), (alg.lam @ alg.vec(bra.mat)).conj()))

    @classmethod
    def from_hom(cls, alg, H):
        return cls(alg, alg.lam @ np.asarray(H, dtype=complex) @ alg.lam_inv)

    @property
    def hom(self) -> np.ndarray:
        a = self.parent
        return a.lam_inv @ self.matrix @ a.lam

    def __matmul__(self, o):
        _check_parent(self.parent, o.parent)
        return SuperOperator(self.parent, self.matrix @ o.matrix)

    def __add__(self, o):
        return SuperOperator(self.parent, self.matrix + o.matrix)

    def __sub__(self, o):
        return SuperOperator(self.parent, self.matrix - o.matrix)

    def __mul__(self, c):
        return SuperOperator(self.parent, c * self.matrix)

    __rmul__ = __mul__

    def adjoint(self):
        return SuperOperator(self.parent, self.matrix.conj().T)

    def dist(self, o) -> float:
        return fro(self.matrix - o.matrix)


def as_map_on_B(A: SuperOperator):
    alg = A.parent
    H = A.hom

    def apply(x: AlgebraElement) -> AlgebraElement:
        _check_parent(alg, x.parent)
        return AlgebraElement(alg, alg.unvec(H @ alg.vec(x.mat)))

    return apply


# ---------------------------------------------------------------------------
# Schur product and θ_A

def schur_product(A: SuperOperator, B: SuperOperator) -> SuperOperator:
    """m (A ⊗ B) m*."""
    _check_parent(A.parent, B.parent)
    alg = A.parent
    d = alg.dim
    M = mult_maps(alg).m.reshape(d, d, d)
    out = np.einsum("rpq,pa,qb,sab->rs", M, A.matrix, B.matrix, M.conj(), optimize=True)
    return SuperOperator(alg, out)


def rank_decomposition(A: SuperOperator, rng=None):
    """Pairs (b_j, a_j) of block-diagonal matrices with A = Σ |Λ b_j⟩⟨Λ a_j|.

    Uses the SVD; passing ``rng`` mixes the singular pairs by a random unitary,
    giving a different but equally valid decomposition.
    """
    alg = A.parent
    U, s, Vh = np.linalg.svd(A.matrix)
    keep = s > alg.tol.rank_tol * max(1.0, s[0] if s.size else 0.0)
    kets = U[:, keep] * s[keep]
    bras = Vh[keep].conj().T
    if rng is not None and kets.shape[1] > 0:
        r = kets.shape[1]
        W, _ = np.linalg.qr(rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r)))
        kets, bras = kets @ W, bras @ W
    qm = alg.qpow(-0.5)
    return [(alg.unvec(kets[:, k]) @ qm, alg.unvec(bras[:, k]) @ qm) for k in range(kets.shape[1])]


def theta_superop(A: SuperOperator, rng=None) -> np.ndarray:
    """θ_A as a dim²×dim² matrix acting on row-major flattenings of operators."""
    alg = A.parent
    d = alg.dim
    out = np.zeros((d * d, d * d), dtype=complex)
    for b, a in rank_decomposition(A, rng):
        out += np.kron(alg.left_op(b), alg.left_op(a).conj())
    return out


def theta_apply(A: SuperOperator, T: SuperOperator, rng=None) -> SuperOperator:
    """Σ_j b_j T a_j* with b_j, a_j acting by left multiplication."""
    _check_parent(A.parent, T.parent)
    alg = A.parent
    out = np.zeros((alg.dim, alg.dim), dtype=complex)
    for b, a in rank_decomposition(A, rng):
        out += alg.left_op(b) @ T.matrix @ alg.left_op(a).conj().T
    return SuperOperator(alg, out)


# ---------------------------------------------------------------------------
# Ψ′ and its inverse.  With e = Σ C[p,q] E_p⊗E_q^op,
#     Ψ′⁻¹(e) = Lam · C · W^H,  W[:, q] = vec(Q^{1/2} E_q^*),
# since Ψ′⁻¹(b⊗c) = |Λ b⟩⟨Λ σ_{-i/2}(c*)| and Λ σ_{-i/2}(c*) = Q^{1/2} c*.

def _W(alg: Algebra) -> np.ndarray:
    cached = getattr(alg, "_psi_W", None)
    if cached is None:
        cached = alg.left_op(alg.qpow(0.5)) @ alg.transpose_perm
        alg._psi_W = cached
    return cached


def psi_prime_inv(e: TensorElement) -> SuperOperator:
    alg = e.parent
    return SuperOperator(alg, alg.lam @ e.coeff() @ _W(alg).conj().T)


def psi_prime(A: SuperOperator) -> TensorElement:
    alg = A.parent
    C = alg.lam_inv @ A.matrix @ np.linalg.inv(_W(alg).conj().T)
    return TensorElement.from_coeff(alg, C)


def tensor_swap(e: TensorElement) -> TensorElement:
    """τ(b⊗c^op) = c⊗b^op."""
    return TensorElement.from_coeff(e.parent, e.coeff().T)


def kms_adjoint(A: SuperOperator) -> SuperOperator:
    alg = A.parent
    return SuperOperator(alg, alg.nabla_op(-0.5) @ A.matrix.conj().T @ alg.nabla_op(0.5))


def kms_inner(alg: Algebra, a, b) -> complex:
    """(a|b)_K = φ(a* σ_{-i/2}(b)) for block-diagonal matrices a, b."""
    s = alg.qpow(0.5) @ b @ alg.qpow(-0.5)
    return complex(np.trace(alg.Q @ a.conj().T @ s))


# ---------------------------------------------------------------------------
# axioms

def choi_blocks(H: np.ndarray, alg: Algebra) -> dict:
    """Choi matrices Σ_{kl ∈ block j} E_kl ⊗ Φ(E_kl)|_{block i} for a hom-level map Φ."""
    out = {}
    for j, nj in enumerate(alg.blocks):
        sj = alg.voffsets[j]
        for i, ni in enumerate(alg.blocks):
            si = alg.voffsets[i]
            # image of E_kl (column sj + k*nj + l) restricted to block i
            img = H[si:si + ni * ni, sj:sj + nj * nj].reshape(ni, ni, nj, nj)  # [a,b,k,l]
            out[(i, j)] = img.transpose(2, 0, 3, 1).reshape(nj * ni, nj * ni)
    return out


def choi_min_eig(H: np.ndarray, alg: Algebra):
    """(min over block pairs of the smallest Choi eigenvalue, largest Choi norm)."""
    lo, scale = np.inf, 0.0
    for c in choi_blocks(H, alg).values():
        c = 0.5 * (c + c.conj().T)
        lo = min(lo, float(np.linalg.eigvalsh(c)[0]))
        scale = max(scale, float(np.linalg.norm(c, 2)))
    return lo, scale


def is_cp(H: np.ndarray, alg: Algebra, tol: float | None = None) -> bool:
    tol = alg.tol.eq_tol if tol is None else tol
    lo, scale = choi_min_eig(H, alg)
    return lo >= -tol * (1.0 + scale)


def realness_residual(A: SuperOperator) -> float:
    alg = A.parent
    H = A.hom
    P = alg.transpose_perm
    # A(x*) vs A(x)*: on coordinates, x* = P conj(x)
    return fro(H @ P - P @ H.conj())


@dataclass
class AxiomReport:
    cp: bool
    cp_min_eig: float
    schur_idempotent: bool
    schur_residual: float
    real: bool
    real_residual: float
    reflexive: bool
    reflexive_residual: float
    kms_self_adjoint: bool
    kms_residual: float
    undirected: bool
    undirected_residual: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def axioms(A: SuperOperator, tol: float | None = None) -> AxiomReport:
    alg = A.parent
    tol = alg.tol.eq_tol if tol is None else tol
    lo, scale = choi_min_eig(A.hom, alg)
    cp = lo >= -tol * (1.0 + scale)
    schur = A.dist(schur_product(A, A))
    real = realness_residual(A)
    refl = fro(schur_product(A, SuperOperator.identity(alg)).matrix - np.eye(alg.dim))
    kms = A.dist(kms_adjoint(A))
    e = psi_prime(A)
    und = (e - tensor_swap(e)).norm()
    return AxiomReport(cp, lo, schur <= tol, schur, real <= tol, real, refl <= tol, refl,
                       kms <= tol, kms, und <= tol, und)


# ---------------------------------------------------------------------------
# subspaces of B(L²(B))

class OperatorSubspace:
    """Subspace of B(L²(B)) with the pairing Tr(X*Y).

    ``cols`` holds an orthonormal basis as columns of row-major flattened
    operators (dim² × r).
    """

    def __init__(self, parent: Algebra, cols):
        d = parent.dim
        cols = np.asarray(cols, dtype=complex).reshape(d * d, -1)
        self.parent = parent
        self.cols = cols

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

    def residual(self, X) -> float:
        """Distance from X to the subspace."""
        v = np.asarray(X, dtype=complex).reshape(-1)
        return float(np.linalg.norm(v - self.cols @ (self.cols.conj().T @ v)))

    def contains(self, X, tol=None) -> bool:
        tol = self.parent.tol.rank_tol if tol is None else tol
        return self.residual(X) <= tol * max(1.0, fro(X))

    def dist(self, other: "OperatorSubspace") -> float:
        return fro(self.projection - other.projection)

    def map(self, f) -> "OperatorSubspace":
        return OperatorSubspace.span(self.parent, [f(X) for X in self.basis])

    def adjoint(self) -> "OperatorSubspace":
        return self.map(lambda X: X.conj().T)


def bimodule_S(A: SuperOperator) -> OperatorSubspace:
    """lin B′ A B′."""
    alg = A.parent
    comm = commutant_basis(alg)
    ops = [c @ A.matrix @ d for c in comm for d in comm]
    return OperatorSubspace.span(alg, ops)


def theta_image(A: SuperOperator) -> OperatorSubspace:
    Th = theta_superop(A)
    return OperatorSubspace(A.parent, span_basis(Th.T, A.parent.tol))


def twist(Sp: OperatorSubspace, z: complex) -> OperatorSubspace:
    """S_z = Q^{-iz} S Q^{iz}, Q acting by left multiplication."""
    alg = Sp.parent
    L = alg.left_op(alg.qpow(-1j * z))
    R = alg.left_op(alg.qpow(1j * z))
    return Sp.map(lambda X: L @ X @ R)


def nabla_twist(Sp: OperatorSubspace, z: complex) -> OperatorSubspace:
    """∇^{-iz} S ∇^{iz}."""
    alg = Sp.parent
    L, R = alg.nabla_op(-1j * z), alg.nabla_op(1j * z)
    return Sp.map(lambda X: L @ X @ R)


def twisted_theta(A: SuperOperator, T, rng=None) -> np.ndarray:
    """Σ_j σ_{-i/4}(b_j) T σ_{i/4}(a_j)*, which fixes exactly the elements of S_{i/4}."""
    alg = A.parent
    q4, qm4 = alg.qpow(0.25), alg.qpow(-0.25)
    out = np.zeros((alg.dim, alg.dim), dtype=complex)
    for b, a in rank_decomposition(A, rng):
        sb = q4 @ b @ qm4                # σ_{-i/4}(b)
        sa = qm4 @ a @ q4                # σ_{i/4}(a)
        out += alg.left_op(sb) @ T @ alg.left_op(sa).conj().T
    return out


def is_bimodule(Sp: OperatorSubspace, tol=None) -> bool:
    tol = Sp.parent.tol.rank_tol if tol is None else tol
    comm = commutant_basis(Sp.parent)
    return all(Sp.residual(c @ X) <= tol * max(1.0, fro(X)) and Sp.residual(X @ c) <= tol * max(1.0, fro(X))
               for X in Sp.basis for c in comm)


# ---------------------------------------------------------------------------

@dataclass
class HilbertFormReport:
    swap_vs_J: float
    J_vs_nabla: float
    real_residual: float


def hilbert_form_relations(A: SuperOperator) -> HilbertFormReport:
    alg = A.parent
    tol = alg.tol.eq_tol
    real = realness_residual(A)
    if real > tol * max(1.0, fro(A.matrix)):
        raise NotReal(f"A is not real (residual {real:.3e})")
    A_tau = psi_prime_inv(tensor_swap(psi_prime(A)))
    JAJ = alg.J_conjugate(A.matrix.conj().T)
    nab = alg.nabla_op(-0.5) @ A.matrix.conj().T @ alg.nabla_op(0.5)
    return HilbertFormReport(fro(A_tau.matrix - JAJ), fro(JAJ - nab), real)
