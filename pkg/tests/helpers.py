"""Independent constructions used as oracles across test modules."""
import numpy as np

from qgraph.algebra import TensorElement
from qgraph.linalg_core import projector, span_basis
from qgraph.sampling import ginibre


def projection_from_ranges(alg, ranges):
    """e whose (i,j) component projects onto the span of the given n_i×n_j matrices."""
    comps = {}
    for (i, j), mats in ranges.items():
        if mats:
            B = span_basis(np.array([np.asarray(m).reshape(-1) for m in mats]))
            comps[(i, j)] = projector(B)
    return TensorElement(alg, comps)


def random_reflexive_projection(alg, rng, extra=1):
    """Random e with Q_i^{-1/2} in every diagonal V⁰, hence 1 ∈ S."""
    nb = alg.blocks
    qm = alg.qpow_blocks(-0.5)
    ranges = {}
    for i in range(len(nb)):
        for j in range(len(nb)):
            k = int(rng.integers(0, nb[i] * nb[j] + 1)) if i != j else extra
            mats = [ginibre(rng, nb[i], nb[j]) for _ in range(k)]
            if i == j:
                mats.append(qm[i])
            ranges[(i, j)] = mats
    return projection_from_ranges(alg, ranges)


def hs_projection_dist(P1, P2):
    return float(np.linalg.norm(P1 - P2))
