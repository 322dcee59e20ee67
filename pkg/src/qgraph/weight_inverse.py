"""The operator-valued weight φ⁻¹ : B(L²(B)) → B′ and related maps.

For an algebraic basis (d_k) of B with (Λ d_k) orthonormal,
    φ⁻¹(X) = Σ_k σ_{i/2}(d_k)* X σ_{i/2}(d_k),
with B acting on L²(B) by left multiplication.  The default basis is
d_k = E_k Q^{-1/2}, so σ_{i/2}(d_k) = Q^{-1/2} E_k.
"""
from __future__ import annotations

import numpy as np

from .algebra import Algebra, TensorElement, _check_parent
from .errors import NotInvariant, ShapeMismatch
from .linalg_core import fro
from .quantum_graph import SuperOperator


class CommutantElement:
    def __init__(self, parent: Algebra, mat, check: bool = True):
        self.parent = parent
        self.mat = np.asarray(mat, dtype=complex)
        if check:
            r = commutation_residual(parent, self.mat)
            if r > parent.tol.rank_tol * max(1.0, fro(self.mat)):
                raise NotInvariant(f"operator does not commute with B (residual {r:.3e})")

    def symbol(self) -> np.ndarray:
        """The c ∈ B with self = (m ↦ m c)."""
        alg = self.parent
        out = []
        for s, n in zip(alg.voffsets, alg.blocks):
            blk = self.mat[s:s + n * n, s:s + n * n].reshape(n, n, n, n)
            # kron(I, c^T)[(a,b),(a',b')] = δ_{aa'} c[b', b]
            out.append(np.einsum("abad->db", blk) / n)
        return alg.join(out)


def commutation_residual(alg: Algebra, X) -> float:
    return max(fro(alg.left_op(E) @ X - X @ alg.left_op(E)) for E in alg.matrix_units)


def gns_orthonormal_basis(alg: Algebra, unitary=None) -> list:
    """d_k with (Λ d_k) orthonormal; an optional unitary mixes the default basis."""
    qm = alg.qpow(-0.5)
    units = alg.matrix_units
    if unitary is None:
        return [E @ qm for E in units]
    U = np.asarray(unitary)
    return [sum(U[l, k] * units[l] for l in range(alg.dim)) @ qm for k in range(alg.dim)]


def phi_inverse(X: SuperOperator, basis=None) -> CommutantElement:
    alg = X.parent
    ds = gns_orthonormal_basis(alg) if basis is None else basis
    qm, qp = alg.qpow(-0.5), alg.qpow(0.5)
    out = np.zeros((alg.dim, alg.dim), dtype=complex)
    for d in ds:
        L = alg.left_op(qm @ d @ qp)
        out += L.conj().T @ X.matrix @ L
    return CommutantElement(alg, out)


def tilde_phi(X: SuperOperator) -> complex:
    """φ̃(X) = Tr(∇⁻¹ X)."""
    alg = X.parent
    return complex(np.trace(alg.nabla_op(-1.0) @ X.matrix))


def phi_prime(c: CommutantElement) -> complex:
    """φ′(J x* J) = φ(x); J x* J is right multiplication by x."""
    return complex(np.trace(c.parent.Q @ c.symbol()))


def tilde_phi_via_commutant(X: SuperOperator) -> complex:
    return phi_prime(phi_inverse(X))


def hat_map(alpha: SuperOperator) -> np.ndarray:
    """α∇^{-1/2} as a Hilbert-Schmidt operator (dim×dim)."""
    return alpha.matrix @ alpha.parent.nabla_op(-0.5)


def hat_operator(alpha: SuperOperator) -> np.ndarray:
    """α̂ : L²(B) → HS(L²(B)), J Λ(a) ↦ α (J a J) ∇^{-1/2}, as a dim²×dim matrix.

    The coordinate vector u_k equals J Λ(a_k) with J a_k J = R_{Q^{-1/2} u_k}.
    """
    alg = alpha.parent
    nab = alg.nabla_op(-0.5)
    qm = alg.qpow(-0.5)
    cols = [(alpha.matrix @ alg.right_op(qm @ E) @ nab).reshape(-1) for E in alg.matrix_units]
    return np.array(cols).T


def slice_second_leg_phi(alg: Algebra, Z: np.ndarray) -> np.ndarray:
    """(id⊗φ^op)(Z) for Z = Σ_p kron(Y_p, L_{E_p}^T) on HS(L²(B)).

    Returns Σ_p φ(E_p) Y_p; raises if Z is not of that form.
    """
    d = alg.dim
    Z4 = Z.reshape(d, d, d, d)  # [a, b, c, e]: rows (a,b), cols (c,e)
    acc = np.zeros((d, d), dtype=complex)
    recon = np.zeros_like(Z)
    for p, E in enumerate(alg.matrix_units):
        Lt = alg.left_op(E).T
        n = alg.blocks[alg.block_of_index(p)[0]]
        Y = np.einsum("abce,be->ac", Z4, Lt.conj()) / n
        recon += np.kron(Y, Lt)
        acc += np.trace(alg.Q @ E) * Y
    if fro(recon - Z) > alg.tol.rank_tol * max(1.0, fro(Z)):
        raise ShapeMismatch("operator does not lie in B(L²)⊗B^op")
    return acc


def slice_adjacency(f: TensorElement, g: TensorElement) -> SuperOperator:
    """A_{f,g}(x) = Σ φ(σ_{i/2}(y_k) x) x_k where f*g = Σ x_k ⊗ y_k^op."""
    _check_parent(f.parent, g.parent)
    alg = f.parent
    C = (f.adjoint() @ g).coeff()
    units = alg.matrix_units
    qm, qp = alg.qpow(-0.5), alg.qpow(0.5)
    # functional x ↦ φ(σ_{i/2}(E_q) x) = Tr(Q Q^{-1/2} E_q Q^{1/2} x) as a row vector in x's coords
    rows = np.array([alg.vec((alg.Q @ qm @ E @ qp).T) for E in units])
    H = np.zeros((alg.dim, alg.dim), dtype=complex)
    for p in range(alg.dim):
        H[p, :] = C[p, :] @ rows
    return SuperOperator.from_hom(alg, H)
