"""Seeded random generators for algebras, tensors and projections."""
from __future__ import annotations

import numpy as np

from .algebra import Algebra, AlgebraElement, TensorElement
from .errors import BadRank
from .linalg_core import DEFAULT_TOL


def rng_of(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def ginibre(rng, rows, cols=None):
    cols = rows if cols is None else cols
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_hermitian(rng, n):
    g = ginibre(rng, n)
    return 0.5 * (g + g.conj().T)


def random_positive(rng, n, floor=0.3):
    g = ginibre(rng, n) / np.sqrt(2 * n)
    return g @ g.conj().T + floor * np.eye(n)


def random_algebra(blocks, seed=None, tracial=False, tol=DEFAULT_TOL) -> Algebra:
    rng = rng_of(seed)
    if tracial:
        return Algebra(blocks, None, tol)
    return Algebra(blocks, [random_positive(rng, n) for n in blocks], tol)


def random_element(alg: Algebra, seed=None) -> AlgebraElement:
    rng = rng_of(seed)
    return AlgebraElement(alg, alg.join([ginibre(rng, n) for n in alg.blocks]))


def random_tensor(alg: Algebra, seed=None) -> TensorElement:
    rng = rng_of(seed)
    nb = alg.blocks
    return TensorElement(alg, {(i, j): ginibre(rng, nb[i] * nb[j])
                               for i in range(len(nb)) for j in range(len(nb))})


def max_rank(alg: Algebra) -> int:
    return alg.N ** 2


def projection_from_hermitian(alg: Algebra, herm: dict, rank: int) -> TensorElement:
    """Spectral projection onto the ``rank`` lowest eigenvalues pooled over all block pairs."""
    eigs = {k: np.linalg.eigh(h) for k, h in herm.items()}
    pool = sorted((float(ev), k, idx) for k, (evs, _) in eigs.items() for idx, ev in enumerate(evs))
    chosen: dict = {k: [] for k in herm}
    for _, k, idx in pool[:rank]:
        chosen[k].append(idx)
    comps = {}
    for k, (_, u) in eigs.items():
        cols = u[:, chosen[k]]
        comps[k] = cols @ cols.conj().T
    return TensorElement(alg, comps)


def random_projection(alg: Algebra, seed=None, rank=None) -> TensorElement:
    rng = rng_of(seed)
    top = max_rank(alg)
    if rank is None:
        rank = int(rng.integers(0, top + 1))
    if not 0 <= rank <= top:
        raise BadRank(f"rank must lie in [0, {top}]")
    nb = alg.blocks
    herm = {(i, j): random_hermitian(rng, nb[i] * nb[j]) for i in range(len(nb)) for j in range(len(nb))}
    return projection_from_hermitian(alg, herm, rank)


def random_symmetric_projection(alg: Algebra, seed=None) -> TensorElement:
    """Projection with τ(e) = e.

    τ is a linear *-anti-automorphism, so it commutes with the functional
    calculus; every spectral projection of a τ-invariant Hermitian H = K + τ(K)
    is therefore τ-invariant.  One global cut is applied to all block pairs.
    """
    from .quantum_graph import tensor_swap
    rng = rng_of(seed)
    K = random_tensor(alg, rng)
    K = K + K.adjoint()
    H = K + tensor_swap(K)
    eigs = {k: np.linalg.eigh(0.5 * (v + v.conj().T)) for k, v in H.comps.items()}
    pool = np.sort(np.concatenate([w for w, _ in eigs.values()]))
    # cut halfway between two neighbouring eigenvalues to stay clear of degeneracies
    k = int(rng.integers(0, pool.size + 1))
    if k == 0:
        cut = pool[0] - 1.0
    elif k == pool.size:
        cut = pool[-1] + 1.0
    else:
        cut = 0.5 * (pool[k - 1] + pool[k])
    comps = {}
    for key, (w, u) in eigs.items():
        sel = w <= cut
        comps[key] = u[:, sel] @ u[:, sel].conj().T
    return TensorElement(alg, comps)
