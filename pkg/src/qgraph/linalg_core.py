"""Dense complex linear algebra helpers shared by every other module.

All matrices are plain ``numpy`` arrays of dtype ``complex128``.  Rank
decisions use ``Tolerance.rank_tol`` scaled by the largest singular value (or
largest input norm) of the data at hand.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotPositive


@dataclass(frozen=True)
class Tolerance:
    eq_tol: float = 1e-9
    rank_tol: float = 1e-8

    def __post_init__(self):
        if not (self.eq_tol > 0 and self.rank_tol > 0):
            raise ValueError("tolerances must be strictly positive")


DEFAULT_TOL = Tolerance()


def fro(x) -> float:
    return float(np.linalg.norm(np.asarray(x).ravel()))


def is_hermitian(m: np.ndarray, tol: float = DEFAULT_TOL.eq_tol) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return fro(m - m.conj().T) <= tol * max(1.0, fro(m))


def herm_eig(m: np.ndarray, tol: Tolerance = DEFAULT_TOL):
    """Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix."""
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m, tol.eq_tol):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    h = 0.5 * (m + m.conj().T)
    evals, u = np.linalg.eigh(h)
    return evals, u


def matrix_power(p: np.ndarray, z: complex, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Principal power ``p**z`` of a positive definite matrix via its eigendecomposition."""
    evals, u = herm_eig(p, tol)
    if evals.size and evals[0] <= tol.rank_tol:
        raise NotPositive(f"min eigenvalue {evals[0]:.3e} is not positive")
    powered = np.exp(complex(z) * np.log(evals))
    return (u * powered) @ u.conj().T


def span_basis(vectors, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Euclidean orthonormal basis (as columns) of the span of the given vectors.

    ``vectors`` is anything reshapeable to (count, length); each row is a vector.
    """
    vs = np.asarray(vectors, dtype=complex)
    if vs.size == 0:
        length = vs.shape[-1] if vs.ndim >= 2 else 0
        return np.zeros((length, 0), dtype=complex)
    vs = vs.reshape(vs.shape[0], -1)
    u, s, _ = np.linalg.svd(vs.T, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((vs.shape[1], 0), dtype=complex)
    rank = int(np.sum(s > tol.rank_tol * max(1.0, s[0])))
    return u[:, :rank]


def orthonormalize(
    vs: Sequence[np.ndarray],
    ip: Callable[[np.ndarray, np.ndarray], complex] | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> list:
    """Modified Gram-Schmidt (two passes) against a sesquilinear form.

    ``ip(u, v)`` must be conjugate-linear in ``u``; the default is the Euclidean
    pairing of the flattened arrays.  Vectors whose remainder has norm at most
    ``rank_tol`` (relative to the largest input norm) are dropped.
    """
    if ip is None:
        ip = lambda u, v: np.vdot(u, v)  # noqa: E731
    vs = [np.asarray(v, dtype=complex) for v in vs]
    if not vs:
        return []
    scale = max(1.0, max(np.sqrt(abs(ip(v, v))) for v in vs))
    basis: list = []
    for v in vs:
        w = v.copy()
        for _ in range(2):
            for b in basis:
                w = w - ip(b, w) * b
        nrm = np.sqrt(abs(ip(w, w)))
        if nrm > tol.rank_tol * scale:
            basis.append(w / nrm)
    return basis


def projector(basis_cols: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto the span of orthonormal columns."""
    return basis_cols @ basis_cols.conj().T


def generated_algebra_dim(gens: Sequence[np.ndarray], tol: Tolerance = DEFAULT_TOL) -> int:
    """Dimension of the smallest unital algebra containing ``gens``."""
    gens = [np.asarray(g, dtype=complex) for g in gens]
    if not gens:
        raise DimensionMismatch("need at least one generator")
    d = gens[0].shape[0]
    for g in gens:
        if g.shape != (d, d):
            raise DimensionMismatch("generators must share one square shape")
    scale = max(1.0, max(fro(g) for g in gens))
    gens = [g / scale for g in gens]
    basis = np.zeros((d * d, 0), dtype=complex)
    frontier = [np.eye(d, dtype=complex)] + gens
    while frontier:
        new = []
        for f in frontier:
            v = f.reshape(-1)
            v = v - basis @ (basis.conj().T @ v)
            v = v - basis @ (basis.conj().T @ v)
            nrm = np.linalg.norm(v)
            if nrm > tol.rank_tol:
                basis = np.hstack([basis, (v / nrm)[:, None]])
                new.append((v / nrm).reshape(d, d))
        if basis.shape[1] >= d * d:
            break
        frontier = [n @ g for n in new for g in gens]
    return basis.shape[1]


def null_space(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel of ``m``."""
    m = np.asarray(m, dtype=complex)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    cut = tol.rank_tol * max(1.0, s[0] if s.size else 0.0)
    rank = int(np.sum(s > cut))
    return vh[rank:].conj().T
