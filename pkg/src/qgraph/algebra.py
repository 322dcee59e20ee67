"""Finite-dimensional C*-algebra B = ⊕ M_{n_i} with state φ = Tr(Q·).

Coordinates
-----------
Elements of B are block-diagonal N×N matrices.  L²(B) is realized as the same
space of block-diagonal matrices with the Hilbert-Schmidt pairing, and the GNS
map is Λ(x) = x Q^{1/2}.  A vector of L²(B) is stored as the concatenation of
the row-major flattenings of its diagonal blocks, so the coordinate basis is
the family of matrix units E_p, p = (block, row, col) in lexicographic order.
This basis is orthonormal for the GNS inner product.

With row-major flattening, vec(X Y Z) = kron(X, Z^T) vec(Y), which fixes the
matrices of left and right multiplication operators below.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Sequence, Tuple

import numpy as np

from .errors import NotPositive, ParentMismatch, ShapeMismatch
from .linalg_core import DEFAULT_TOL, Tolerance, fro, herm_eig


class Algebra:
    """The pair (B, φ).  Immutable; fractional powers of Q are cached on demand."""

    def __init__(self, blocks: Sequence[int], Q=None, tol: Tolerance = DEFAULT_TOL,
                 normalize_inverse_trace: bool = False):
        blocks = tuple(int(b) for b in blocks)
        if not blocks or any(b <= 0 for b in blocks):
            raise ShapeMismatch("blocks must be a nonempty list of positive integers")
        self.blocks = blocks
        self.tol = tol
        self.N = sum(blocks)
        self.dim = sum(b * b for b in blocks)
        self.offsets = np.concatenate([[0], np.cumsum(blocks)]).astype(int)
        self.voffsets = np.concatenate([[0], np.cumsum([b * b for b in blocks])]).astype(int)

        if Q is None:
            Qb = [np.eye(n, dtype=complex) for n in blocks]
        elif isinstance(Q, (list, tuple)):
            Qb = [np.asarray(q, dtype=complex) for q in Q]
            if len(Qb) != len(blocks) or any(q.shape != (n, n) for q, n in zip(Qb, blocks)):
                raise ShapeMismatch("per-block Q shapes do not match blocks")
        else:
            Qf = np.asarray(Q, dtype=complex)
            if Qf.shape != (self.N, self.N):
                raise ShapeMismatch(f"Q must be {self.N}x{self.N}")
            if fro(Qf - self._mask() * Qf) > tol.eq_tol * max(1.0, fro(Qf)):
                raise ShapeMismatch("Q is not block-diagonal for these blocks")
            Qb = self._split(Qf)
        self._eig = []
        for q in Qb:
            evals, u = herm_eig(q, tol)
            if evals[0] <= tol.rank_tol:
                raise NotPositive(f"Q has eigenvalue {evals[0]:.3e}")
            self._eig.append((evals, u))
        # keep the given entries (hermitized) so that serialization round-trips exactly
        self.Q_blocks = [0.5 * (q + q.conj().T) for q in Qb]
        if normalize_inverse_trace:
            # rescale each block so that Tr(Q_i^{-1}) = 1
            scale = [np.sum(1.0 / ev) for ev, _ in self._eig]
            self._eig = [(ev * c, u) for (ev, u), c in zip(self._eig, scale)]
            self.Q_blocks = [q * c for q, c in zip(self.Q_blocks, scale)]
        self.Q = self._join(self.Q_blocks)
        self._powers: Dict[complex, list] = {}
        for s in (0.5, -0.5, 0.25, -0.25, 1.0, -1.0):
            self.qpow_blocks(s)

    # -- block plumbing -------------------------------------------------
    def _mask(self) -> np.ndarray:
        m = np.zeros((self.N, self.N))
        for i, n in enumerate(self.blocks):
            o = self.offsets[i]
            m[o:o + n, o:o + n] = 1.0
        return m

    def _split(self, mat: np.ndarray) -> list:
        return [mat[o:o + n, o:o + n] for o, n in zip(self.offsets, self.blocks)]

    def _join(self, bl: Sequence[np.ndarray]) -> np.ndarray:
        out = np.zeros((self.N, self.N), dtype=complex)
        for o, n, b in zip(self.offsets, self.blocks, bl):
            out[o:o + n, o:o + n] = b
        return out

    def split(self, mat) -> list:
        return self._split(np.asarray(mat, dtype=complex))

    def join(self, bl) -> np.ndarray:
        return self._join(bl)

    def check_block_diagonal(self, mat) -> np.ndarray:
        mat = np.asarray(mat, dtype=complex)
        if mat.shape != (self.N, self.N):
            raise ShapeMismatch(f"expected {self.N}x{self.N}, got {mat.shape}")
        if fro(mat - self._mask() * mat) > self.tol.eq_tol * max(1.0, fro(mat)):
            raise ShapeMismatch("matrix has entries outside the diagonal blocks")
        return self._mask() * mat

    def vec(self, mat) -> np.ndarray:
        return np.concatenate([b.reshape(-1) for b in self._split(np.asarray(mat, dtype=complex))])

    def unvec(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        bl = [v[s:s + n * n].reshape(n, n) for s, n in zip(self.voffsets, self.blocks)]
        return self._join(bl)

    def block_of_index(self, p: int) -> Tuple[int, int, int]:
        i = int(np.searchsorted(self.voffsets, p, side="right") - 1)
        n = self.blocks[i]
        r = p - self.voffsets[i]
        return i, r // n, r % n

    @cached_property
    def matrix_units(self) -> list:
        out = []
        for p in range(self.dim):
            e = np.zeros(self.dim, dtype=complex)
            e[p] = 1.0
            out.append(self.unvec(e))
        return out

    @property
    def is_tracial(self) -> bool:
        return all(fro(q - q[0, 0] * np.eye(len(q))) <= self.tol.eq_tol for q in self.Q_blocks)

    # -- powers of Q ----------------------------------------------------
    def qpow_blocks(self, s: complex) -> list:
        key = complex(s)
        if key not in self._powers:
            self._powers[key] = [(u * np.exp(key * np.log(ev))) @ u.conj().T for ev, u in self._eig]
        return self._powers[key]

    def qpow(self, s: complex) -> np.ndarray:
        return self._join(self.qpow_blocks(s))

    # -- operators on L²(B) ---------------------------------------------
    def left_op(self, b) -> np.ndarray:
        """Matrix of m ↦ b m on L²(B)."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for (s, n), bb in zip(zip(self.voffsets, self.blocks), self._split(np.asarray(b, dtype=complex))):
            out[s:s + n * n, s:s + n * n] = np.kron(bb, np.eye(n))
        return out

    def right_op(self, c) -> np.ndarray:
        """Matrix of m ↦ m c on L²(B)."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for (s, n), cc in zip(zip(self.voffsets, self.blocks), self._split(np.asarray(c, dtype=complex))):
            out[s:s + n * n, s:s + n * n] = np.kron(np.eye(n), cc.T)
        return out

    @cached_property
    def lam(self) -> np.ndarray:
        """Matrix of Λ from B (matrix-unit coordinates) to L²(B)."""
        return self.right_op(self.qpow(0.5))

    @cached_property
    def lam_inv(self) -> np.ndarray:
        return self.right_op(self.qpow(-0.5))

    @cached_property
    def transpose_perm(self) -> np.ndarray:
        """Permutation matrix of m ↦ m^T (blockwise)."""
        out = np.zeros((self.dim, self.dim))
        for s, n in zip(self.voffsets, self.blocks):
            for k in range(n):
                for l in range(n):
                    out[s + l * n + k, s + k * n + l] = 1.0
        return out

    def nabla_op(self, s: complex) -> np.ndarray:
        """Matrix of ∇^s : m ↦ Q^s m Q^{-s}."""
        return self.left_op(self.qpow(s)) @ self.right_op(self.qpow(-s))

    def J_conjugate(self, X: np.ndarray) -> np.ndarray:
        """J X J for a linear operator X on L²(B)."""
        P = self.transpose_perm
        return P @ np.conj(X) @ P

    def __repr__(self):
        return f"Algebra(blocks={self.blocks})"

    def same_as(self, other: "Algebra") -> bool:
        return other is self or (
            self.blocks == other.blocks and fro(self.Q - other.Q) <= self.tol.eq_tol
        )


def new_algebra(blocks, Q=None, tol: Tolerance = DEFAULT_TOL, normalize_inverse_trace=False) -> Algebra:
    return Algebra(blocks, Q, tol, normalize_inverse_trace)


def _check_parent(a: Algebra, b: Algebra):
    if not a.same_as(b):
        raise ParentMismatch("objects belong to different algebras")


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    parent: Algebra
    mat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mat", self.parent.check_block_diagonal(self.mat))

    def __add__(self, o):
        _check_parent(self.parent, o.parent)
        return AlgebraElement(self.parent, self.mat + o.mat)

    def __sub__(self, o):
        _check_parent(self.parent, o.parent)
        return AlgebraElement(self.parent, self.mat - o.mat)

    def __mul__(self, o):
        if isinstance(o, AlgebraElement):
            _check_parent(self.parent, o.parent)
            return AlgebraElement(self.parent, self.mat @ o.mat)
        return AlgebraElement(self.parent, self.mat * o)

    __rmul__ = lambda self, c: AlgebraElement(self.parent, c * self.mat)  # noqa: E731

    def adjoint(self):
        return AlgebraElement(self.parent, self.mat.conj().T)

    @classmethod
    def one(cls, parent):
        return cls(parent, np.eye(parent.N, dtype=complex))


@dataclass(frozen=True, eq=False)
class GnsVector:
    parent: Algebra
    mat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mat", self.parent.check_block_diagonal(self.mat))

    @property
    def coords(self) -> np.ndarray:
        return self.parent.vec(self.mat)

    def inner(self, o: "GnsVector") -> complex:
        _check_parent(self.parent, o.parent)
        return complex(np.vdot(self.mat, o.mat))


def state_phi(x: AlgebraElement, alg: Algebra | None = None) -> complex:
    if alg is not None:
        _check_parent(alg, x.parent)
    return complex(np.trace(x.parent.Q @ x.mat))


def gns_lambda(x: AlgebraElement) -> GnsVector:
    return GnsVector(x.parent, x.mat @ x.parent.qpow(0.5))


def gns_inverse(v: GnsVector) -> AlgebraElement:
    return AlgebraElement(v.parent, v.mat @ v.parent.qpow(-0.5))


def sigma_z(x: AlgebraElement, z: complex) -> AlgebraElement:
    a = x.parent
    return AlgebraElement(a, a.qpow(1j * z) @ x.mat @ a.qpow(-1j * z))


def modular_J(v: GnsVector) -> GnsVector:
    return GnsVector(v.parent, v.mat.conj().T)


def modular_nabla(v: GnsVector, s: complex) -> GnsVector:
    a = v.parent
    return GnsVector(a, a.qpow(s) @ v.mat @ a.qpow(-s))


@dataclass(frozen=True)
class MultMaps:
    """m : L²⊗L² → L², its adjoint, η : ℂ → L² and η*.

    Tensor coordinates are kron-ordered: index p*dim + q for u_p ⊗ u_q.
    """
    m: np.ndarray
    m_star: np.ndarray
    eta: np.ndarray
    eta_star: np.ndarray


def mult_maps(alg: Algebra) -> MultMaps:
    return _mult_maps_cached(alg)


def _mult_maps_cached(alg: Algebra) -> MultMaps:
    cached = getattr(alg, "_mult_cache", None)
    if cached is not None:
        return cached
    d = alg.dim
    qm = alg.qpow(-0.5)
    units = alg.matrix_units
    m = np.zeros((d, d * d), dtype=complex)
    # u_p = Λ(E_p Q^{-1/2}), so m(u_p ⊗ u_q) = Λ(E_p Q^{-1/2} E_q Q^{-1/2}) = E_p Q^{-1/2} E_q
    for p in range(d):
        left = units[p] @ qm
        for q in range(d):
            m[:, p * d + q] = alg.vec(left @ units[q])
    eta = alg.vec(alg.qpow(0.5)).reshape(d, 1)
    out = MultMaps(m, m.conj().T, eta, eta.conj().T)
    alg._mult_cache = out
    return out


def commutant_basis(alg: Algebra) -> list:
    """HS-orthonormal basis of B′ = {m ↦ m c}, one element per matrix unit."""
    out = []
    for p, e in enumerate(alg.matrix_units):
        i, _, _ = alg.block_of_index(p)
        out.append(alg.right_op(e) / np.sqrt(alg.blocks[i]))
    return out


class TensorElement:
    """Element of B⊗B^op stored blockwise.

    comps[(i, j)] is an (n_i n_j)×(n_i n_j) matrix; b⊗c^op with b in block i and
    c in block j is stored as kron(b, c^T).  Missing pairs are zero.
    """

    def __init__(self, parent: Algebra, comps: Dict[Tuple[int, int], np.ndarray] | None = None):
        self.parent = parent
        self.comps: Dict[Tuple[int, int], np.ndarray] = {}
        for (i, j), c in (comps or {}).items():
            c = np.asarray(c, dtype=complex)
            size = parent.blocks[i] * parent.blocks[j]
            if c.shape != (size, size):
                raise ShapeMismatch(f"component {(i, j)} must be {size}x{size}")
            self.comps[(int(i), int(j))] = c

    def pairs(self):
        r = range(len(self.parent.blocks))
        return [(i, j) for i in r for j in r]

    def comp(self, i, j) -> np.ndarray:
        c = self.comps.get((i, j))
        if c is None:
            size = self.parent.blocks[i] * self.parent.blocks[j]
            return np.zeros((size, size), dtype=complex)
        return c

    @classmethod
    def zero(cls, parent):
        return cls(parent, {})

    @classmethod
    def one(cls, parent):
        nb = parent.blocks
        return cls(parent, {(i, j): np.eye(nb[i] * nb[j], dtype=complex)
                            for i in range(len(nb)) for j in range(len(nb))})

    @classmethod
    def simple(cls, b: AlgebraElement, c: AlgebraElement):
        """b ⊗ c^op."""
        _check_parent(b.parent, c.parent)
        alg = b.parent
        bb, cb = alg.split(b.mat), alg.split(c.mat)
        comps = {(i, j): np.kron(bb[i], cb[j].T) for i in range(len(bb)) for j in range(len(cb))}
        return cls(alg, comps)

    # coefficient matrix C with e = Σ C[p, q] E_p ⊗ E_q^op
    @classmethod
    def from_coeff(cls, parent: Algebra, C) -> "TensorElement":
        C = np.asarray(C, dtype=complex)
        if C.shape != (parent.dim, parent.dim):
            raise ShapeMismatch("coefficient matrix must be dim x dim")
        comps = {}
        for i, ni in enumerate(parent.blocks):
            si = parent.voffsets[i]
            for j, nj in enumerate(parent.blocks):
                sj = parent.voffsets[j]
                C4 = C[si:si + ni * ni, sj:sj + nj * nj].reshape(ni, ni, nj, nj)
                comps[(i, j)] = C4.transpose(0, 3, 1, 2).reshape(ni * nj, ni * nj)
        return cls(parent, comps)

    def coeff(self) -> np.ndarray:
        a = self.parent
        C = np.zeros((a.dim, a.dim), dtype=complex)
        for (i, j), comp in self.comps.items():
            ni, nj = a.blocks[i], a.blocks[j]
            si, sj = a.voffsets[i], a.voffsets[j]
            C4 = comp.reshape(ni, nj, ni, nj).transpose(0, 2, 3, 1)
            C[si:si + ni * ni, sj:sj + nj * nj] = C4.reshape(ni * ni, nj * nj)
        return C

    def _binary(self, o, f):
        _check_parent(self.parent, o.parent)
        return TensorElement(self.parent, {k: f(self.comp(*k), o.comp(*k)) for k in self.pairs()})

    def __add__(self, o):
        return self._binary(o, lambda x, y: x + y)

    def __sub__(self, o):
        return self._binary(o, lambda x, y: x - y)

    def __matmul__(self, o):
        return self._binary(o, lambda x, y: x @ y)

    def __mul__(self, c):
        return TensorElement(self.parent, {k: c * v for k, v in self.comps.items()})

    __rmul__ = __mul__

    def adjoint(self) -> "TensorElement":
        return TensorElement(self.parent, {k: v.conj().T for k, v in self.comps.items()})

    def norm(self) -> float:
        return float(np.sqrt(sum(fro(v) ** 2 for v in self.comps.values())))

    def trace(self) -> complex:
        return complex(sum(np.trace(v) for v in self.comps.values()))

    def projection_residual(self) -> float:
        """max(‖e − e*‖, ‖e² − e‖)."""
        r = 0.0
        for v in self.comps.values():
            r = max(r, fro(v - v.conj().T), fro(v @ v - v))
        return r
