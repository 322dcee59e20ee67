"""Commutative atomic case: B = ℓ^∞_n with weights φ_i and a relation ∼."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import FrozenSet, Tuple

import numpy as np

from .algebra import Algebra, TensorElement
from .errors import InvalidSpec
from .linalg_core import DEFAULT_TOL, Tolerance


@dataclass(frozen=True)
class WeightedRelation:
    n: int
    weights: Tuple[float, ...]
    edges: FrozenSet[Tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "edges", frozenset((int(i), int(j)) for i, j in self.edges))
        if self.n <= 0 or len(w) != self.n:
            raise InvalidSpec("need n > 0 and one weight per point")
        if any(not x > 0 for x in w):
            raise InvalidSpec("weights must be strictly positive")
        if any(not (0 <= i < self.n and 0 <= j < self.n) for i, j in self.edges):
            raise InvalidSpec("edge index out of range")

    @classmethod
    def from_json(cls, obj: dict):
        try:
            return cls(int(obj["n"]), tuple(obj["weights"]), frozenset(tuple(e) for e in obj["edges"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpec(f"bad relation: {exc}") from exc

    def to_json(self) -> dict:
        return {"n": self.n, "weights": list(self.weights), "edges": [list(e) for e in sorted(self.edges)]}

    def indicator(self) -> np.ndarray:
        m = np.zeros((self.n, self.n))
        for i, j in self.edges:
            m[i, j] = 1.0
        return m


def order_relation(weights) -> WeightedRelation:
    """i ∼ j exactly when j ≥ i."""
    n = len(weights)
    return WeightedRelation(n, tuple(weights), frozenset((i, j) for i in range(n) for j in range(i, n)))


def atomic_adjacency(R: WeightedRelation) -> np.ndarray:
    return R.indicator() * np.asarray(R.weights)[None, :]


def atomic_degree(R: WeightedRelation) -> np.ndarray:
    return atomic_adjacency(R).sum(axis=1)


def schur_symbol(R: WeightedRelation) -> np.ndarray:
    return R.indicator()


def apply_schur_symbol(R: WeightedRelation, X) -> np.ndarray:
    return schur_symbol(R) * np.asarray(X)


def embed(R: WeightedRelation):
    """(Algebra with all blocks of size 1 and Q = diag(φ), e = Σ_{i∼j} E_ii ⊗ E_jj^op)."""
    # summable weights such as 2^{-j} fall below the default positivity floor,
    # so the floor is scaled to the smallest weight
    tol = Tolerance(DEFAULT_TOL.eq_tol, min(DEFAULT_TOL.rank_tol, 0.5 * min(R.weights)))
    alg = Algebra((1,) * R.n, [np.array([[w]]) for w in R.weights], tol)
    one = np.ones((1, 1), dtype=complex)
    e = TensorElement(alg, {(i, j): one for i, j in R.edges})
    return alg, e
