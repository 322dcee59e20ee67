import numpy as np
import pytest

from qgraph.algebra import Algebra, TensorElement
from qgraph.errors import NotBimodule
from qgraph.linalg_core import generated_algebra_dim
from qgraph.quantum_graph import OperatorSubspace, bimodule_S, psi_prime_inv
from qgraph.sampling import ginibre, random_algebra, random_projection
from qgraph.tracial_transport import (MatrixSubspace, bimodule_from_left, bimodule_residual,
                                      common_eigenvectors, cp_both_ways, has_invariant_subspace,
                                      is_irreducible, left_data, property_trio,
                                      tracial_reference, transport_adjacency, transport_bimodule)

from conftest import fro

SHAPES = [(2,), (3,), (1, 2), (2, 2)]
GENS = [np.diag([1.0, 2.0]), np.array([[0.0, 1.0], [1.0, 1.0]])]


@pytest.fixture(params=SHAPES, ids=str)
def qalg(request, rng):
    return random_algebra(request.param, rng)


def corner(alg, i, j, m):
    X = np.zeros((alg.N, alg.N), dtype=complex)
    oi, oj = alg.offsets[i], alg.offsets[j]
    X[oi:oi + m.shape[0], oj:oj + m.shape[1]] = m
    return X


def random_left_data(alg, rng, count=None):
    mats = []
    nb = alg.blocks
    for i in range(len(nb)):
        for j in range(len(nb)):
            k = int(rng.integers(0, nb[i] * nb[j] + 1)) if count is None else count
            mats += [corner(alg, i, j, ginibre(rng, nb[i], nb[j])) for _ in range(k)]
    return mats


def tracial_copy(alg, e):
    return TensorElement(tracial_reference(alg), dict(e.comps))


# -- adjacency ---------------------------------------------------------------

def test_transport_trivial_q(rng):
    alg = Algebra((1, 2))
    H = ginibre(rng, alg.dim)
    assert fro(transport_adjacency(alg, H) - H) < 1e-12


def test_transport_trace_functional(qalg):
    # A_Tr(x) = Tr(x)·1 becomes x ↦ φ(x)·1
    one = qalg.vec(np.eye(qalg.N))
    tr = qalg.vec(np.eye(qalg.N))
    H_tr = np.outer(one, tr)
    H_phi = transport_adjacency(qalg, H_tr)
    expect = np.outer(one, qalg.vec(qalg.Q.T))
    assert fro(H_phi - expect) < 1e-12 * fro(expect)


def test_transport_naturality(qalg, rng):
    for _ in range(50):
        e = random_projection(qalg, rng)
        H_phi = psi_prime_inv(e).hom
        H_tr = psi_prime_inv(tracial_copy(qalg, e)).hom
        assert fro(transport_adjacency(qalg, H_tr) - H_phi) < 1e-9 * (1 + fro(H_phi))
        assert fro(transport_adjacency(qalg, H_phi, inverse=True) - H_tr) < 1e-9 * (1 + fro(H_tr))


def test_cp_both_ways(qalg, rng):
    for _ in range(10):
        e = random_projection(qalg, rng)
        H_tr = psi_prime_inv(tracial_copy(qalg, e)).hom
        assert cp_both_ways(qalg, H_tr) == (True, True)
    assert cp_both_ways(qalg, -np.eye(qalg.dim)) == (False, False)
    for _ in range(10):
        H = ginibre(rng, qalg.dim)
        a, b = cp_both_ways(qalg, H)
        assert a == b


# -- bimodules ---------------------------------------------------------------

def test_bimodule_check(qalg, rng):
    S = MatrixSubspace.span(random_left_data(qalg, rng, 1), qalg.N)
    assert bimodule_residual(qalg, S) < 1e-12
    if len(qalg.blocks) > 1:
        bad = MatrixSubspace.span([ginibre(rng, qalg.N)], qalg.N)
        with pytest.raises(NotBimodule):
            transport_bimodule(qalg, bad)


def test_left_data_roundtrip(qalg, rng):
    S = MatrixSubspace.span(random_left_data(qalg, rng, 1), qalg.N)
    full = bimodule_from_left(qalg, S)
    assert left_data(full).dist(S) < 1e-9


def test_left_data_of_graph(qalg, rng):
    e = random_projection(qalg, rng)
    S = bimodule_S(psi_prime_inv(e))
    assert bimodule_from_left(qalg, left_data(S)).dist(S) < 1e-8


def test_transport_bimodule_trivial(rng):
    alg = Algebra((2,))
    S = MatrixSubspace.span(GENS, 2)
    assert transport_bimodule(alg, S, "S").dist(S) < 1e-12
    assert transport_bimodule(alg, S, "T").dist(S) < 1e-12
    with pytest.raises(ValueError):
        transport_bimodule(alg, S, "X")


def test_transport_bimodule_roundtrip(qalg, rng):
    S = MatrixSubspace.span(random_left_data(qalg, rng), qalg.N)
    if S.dim == 0:
        return
    for which in "ST":
        there = transport_bimodule(qalg, S, which)
        assert transport_bimodule(qalg, there, which, inverse=True).dist(S) < 1e-9


def test_transport_matches_graph_bimodules(qalg, rng):
    # the left data of S_φ is the tracial left data times Q^{1/2}
    e = random_projection(qalg, rng)
    S_tr = left_data(bimodule_S(psi_prime_inv(tracial_copy(qalg, e))))
    S_phi = left_data(bimodule_S(psi_prime_inv(e)))
    assert transport_bimodule(qalg, S_tr, "S").dist(S_phi) < 1e-8


# -- property trio --------------------------------------------------------------

def _trio_instances(alg, rng):
    qm = alg.qpow(-0.5)
    base = random_left_data(alg, rng, 1)
    sa = base + [m.conj().T for m in base]
    # S_φ self-adjoint pulled back: S_Tr = S_φ Q^{-1/2}
    twisted = [m @ qm for m in sa]
    # bimodule data holds each diagonal corner of Q^{-1/2} separately
    qcorners = [corner(alg, i, i, q) for i, q in enumerate(alg.qpow_blocks(-0.5))]
    return [base, sa, base + qcorners, twisted, sa + qcorners]


def test_property_trio_agreement(qalg, rng):
    flags = set()
    for _ in range(10):
        for mats in _trio_instances(qalg, rng):
            rep = property_trio(qalg, MatrixSubspace.span(mats, qalg.N))
            assert rep.agree, rep.as_dict()
            flags.add((rep.reflexive_phi, rep.selfadj_S_phi, rep.selfadj_T_phi))
    # every item is seen both true and false
    for k in range(3):
        assert {f[k] for f in flags} == {True, False}


def test_property_trio_example():
    for q in ([[2.0, 0.3], [0.3, 1.0]], [[1.0, 0.0], [0.0, 5.0]]):
        alg = Algebra((2,), np.array(q))
        rep = property_trio(alg, MatrixSubspace.span(GENS, 2))
        assert rep.selfadj_T_phi and rep.selfadj_T_tr and rep.agree


# -- irreducibility -------------------------------------------------------------

def test_irreducible_examples():
    assert is_irreducible(GENS)
    assert generated_algebra_dim(GENS) == 4
    assert not is_irreducible([np.eye(2)])
    assert not is_irreducible([np.eye(3), np.diag([1.0, 2.0, 3.0])])
    assert not is_irreducible([])


def test_irreducible_vs_bruteforce(rng):
    for d in (2, 3):
        for _ in range(20):
            if rng.random() < 0.5:
                gens = [ginibre(rng, d) for _ in range(2)]
            else:
                U = np.linalg.qr(ginibre(rng, d))[0]
                gens = []
                for _ in range(2):
                    g = ginibre(rng, d)
                    g[1:, 0] = 0  # fixes the first basis line
                    gens.append(U @ g @ U.conj().T)
            assert is_irreducible(gens) == (not has_invariant_subspace(gens))


def test_common_eigenvectors_diagonal():
    gens = [np.diag([1.0, 2.0, 3.0]), np.diag([4.0, 4.0, 1.0])]
    vs = common_eigenvectors(gens)
    assert len(vs) == 3
    for v in vs:
        for g in gens:
            assert np.linalg.norm(g @ v - np.vdot(v, g @ v) * v) < 1e-10


def test_operator_subspace_input(rng):
    alg = Algebra((2,))
    S = bimodule_S(psi_prime_inv(TensorElement.one(alg)))
    assert isinstance(S, OperatorSubspace)
    assert is_irreducible(S)
