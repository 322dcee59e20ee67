import numpy as np
import pytest
from hypothesis import given, strategies as st

from qgraph.algebra import Algebra, AlgebraElement, TensorElement, sigma_z, state_phi
from qgraph.errors import NotReal
from qgraph.quantum_graph import (OperatorSubspace, SuperOperator, as_map_on_B, axioms, bimodule_S,
                                  hilbert_form_relations, kms_adjoint, kms_inner, nabla_twist,
                                  psi_prime, psi_prime_inv, rank_decomposition, schur_product,
                                  tensor_swap, theta_apply, theta_image, twist, twisted_theta)
from qgraph.sampling import (ginibre, random_algebra, random_element, random_projection,
                             random_symmetric_projection, random_tensor)

from conftest import fro
from helpers import random_reflexive_projection

SHAPES = [(2,), (3,), (1, 2), (2, 2)]


def complete_graph(alg):
    one = AlgebraElement.one(alg)
    return SuperOperator.rank_one(one, one)


def random_superop(alg, rng):
    return SuperOperator(alg, ginibre(rng, alg.dim))


# -- as_map_on_B -----------------------------------------------------------

def test_as_map_identity(alg, rng):
    x = random_element(alg, rng)
    assert fro(as_map_on_B(SuperOperator.identity(alg))(x).mat - x.mat) < 1e-12 * fro(x.mat)


def test_as_map_rank_one(alg, rng):
    a, b, x = (random_element(alg, rng) for _ in range(3))
    A = SuperOperator.rank_one(b, a)
    expect = state_phi(a.adjoint() * x) * b.mat
    assert fro(as_map_on_B(A)(x).mat - expect) < 1e-10 * (1 + fro(expect))


def test_as_map_transpose_tracial():
    alg = Algebra((3,))
    A = SuperOperator(alg, alg.transpose_perm)
    for E in alg.matrix_units:
        assert fro(as_map_on_B(A)(AlgebraElement(alg, E)).mat - E.T) == 0


# -- Schur product ---------------------------------------------------------

def test_schur_commutative_is_entrywise(rng):
    q = rng.uniform(0.2, 2.0, size=4)
    alg = Algebra((1,) * 4, [np.array([[v]]) for v in q])
    A, B = random_superop(alg, rng), random_superop(alg, rng)
    # hom entries divided by the column weight multiply entrywise
    scaled = lambda X: X.hom / q[None, :]  # noqa: E731
    assert fro(scaled(schur_product(A, B)) - scaled(A) * scaled(B)) < 1e-10 * 100


def test_schur_zero_and_bilinear(alg, rng):
    A, B, C = (random_superop(alg, rng) for _ in range(3))
    Z = SuperOperator(alg, np.zeros((alg.dim, alg.dim)))
    assert fro(schur_product(A, Z).matrix) == 0
    lhs = schur_product(A, B * 2.0 + C).matrix
    rhs = 2.0 * schur_product(A, B).matrix + schur_product(A, C).matrix
    assert fro(lhs - rhs) < 1e-10 * (1 + fro(rhs))


def test_schur_associative(alg, rng):
    A, B, C = (random_superop(alg, rng) for _ in range(3))
    lhs = schur_product(schur_product(A, B), C).matrix
    rhs = schur_product(A, schur_product(B, C)).matrix
    assert fro(lhs - rhs) < 1e-9 * (1 + fro(rhs))


@pytest.mark.parametrize("blocks", SHAPES)
def test_schur_idempotent_on_projections(blocks, rng):
    alg = random_algebra(blocks, rng)
    A = psi_prime_inv(random_projection(alg, rng))
    assert A.dist(schur_product(A, A)) < 1e-9


# -- θ_A -------------------------------------------------------------------

def test_theta_recovers_A(alg, rng):
    A = random_superop(alg, rng)
    assert theta_apply(A, complete_graph(alg)).dist(A) < 1e-9 * fro(A.matrix)


def test_theta_decomposition_independent(alg, rng):
    A, T = random_superop(alg, rng), random_superop(alg, rng)
    r1 = theta_apply(A, T)
    r2 = theta_apply(A, T, rng=rng)
    assert r1.dist(r2) < 1e-9 * (1 + fro(r1.matrix))


def test_theta_matches_brute_force(rng):
    alg = Algebra((2,))
    pairs = [(random_element(alg, rng), random_element(alg, rng)) for _ in range(3)]
    A = SuperOperator(alg, sum(SuperOperator.rank_one(b, a).matrix for b, a in pairs))
    T = random_superop(alg, rng)
    brute = sum(alg.left_op(b.mat) @ T.matrix @ alg.left_op(a.mat).conj().T for b, a in pairs)
    assert fro(theta_apply(A, T).matrix - brute) < 1e-9 * fro(brute)
    # the rank decomposition reproduces A itself
    re = sum(SuperOperator.rank_one(AlgebraElement(alg, b), AlgebraElement(alg, a)).matrix
             for b, a in rank_decomposition(A))
    assert fro(re - A.matrix) < 1e-10 * fro(A.matrix)


def test_theta_equals_schur(alg, rng):
    A, T = random_superop(alg, rng), random_superop(alg, rng)
    assert theta_apply(A, T).dist(schur_product(A, T)) < 1e-9 * (1 + fro(A.matrix) * fro(T.matrix))


@pytest.mark.parametrize("blocks", SHAPES)
def test_theta_idempotent_for_adjacency(blocks, rng):
    alg = random_algebra(blocks, rng)
    A = psi_prime_inv(random_projection(alg, rng))
    T = random_superop(alg, rng)
    once = theta_apply(A, T)
    assert theta_apply(A, once).dist(once) < 1e-9 * (1 + fro(once.matrix))


# -- Ψ′ --------------------------------------------------------------------

def test_psi_complete_graph(alg):
    e = psi_prime(complete_graph(alg))
    assert (e - TensorElement.one(alg)).norm() < 1e-10
    assert psi_prime_inv(TensorElement.one(alg)).dist(complete_graph(alg)) < 1e-10


def test_psi_rank_one_formula(alg, rng):
    for _ in range(5):
        a, b = random_element(alg, rng), random_element(alg, rng)
        e = psi_prime(SuperOperator.rank_one(b, a))
        expect = TensorElement.simple(b, sigma_z(a, 0.5j).adjoint())
        assert (e - expect).norm() < 1e-9 * expect.norm()


def test_psi_tracial_rank_one(rng):
    alg = Algebra((1, 2))
    a, b = random_element(alg, rng), random_element(alg, rng)
    e = psi_prime(SuperOperator.rank_one(b, a))
    assert (e - TensorElement.simple(b, a.adjoint())).norm() < 1e-10 * e.norm()


def test_psi_inverse_on_simple_tensors(alg, rng):
    b, c = random_element(alg, rng), random_element(alg, rng)
    A = psi_prime_inv(TensorElement.simple(b, c))
    bra = sigma_z(c.adjoint(), -0.5j)
    assert A.dist(SuperOperator.rank_one(b, bra)) < 1e-9 * fro(A.matrix)


@pytest.mark.parametrize("blocks", SHAPES)
def test_psi_roundtrip(blocks, rng):
    alg = random_algebra(blocks, rng)
    for _ in range(25):
        e = random_tensor(alg, rng)
        assert (psi_prime(psi_prime_inv(e)) - e).norm() <= 1e-10 * max(1, e.norm())
        A = random_superop(alg, rng)
        assert psi_prime_inv(psi_prime(A)).dist(A) <= 1e-10 * max(1, fro(A.matrix))


@pytest.mark.parametrize("blocks", SHAPES)
def test_bijection_with_projections(blocks, rng):
    alg = random_algebra(blocks, rng)
    for _ in range(25):
        e = random_projection(alg, rng)
        A = psi_prime_inv(e)
        rep = axioms(A, 1e-8)
        assert rep.cp and rep.schur_idempotent
        assert psi_prime(A).projection_residual() < 1e-8
    # failing either axiom means Ψ′(A) is not a projection
    for _ in range(5):
        A = random_superop(alg, rng)
        rep = axioms(A, 1e-8)
        assert not (rep.cp and rep.schur_idempotent)
        assert psi_prime(A).projection_residual() > 1e-8


# -- axioms ----------------------------------------------------------------

def test_axioms_examples(alg, rng):
    rep = axioms(complete_graph(alg))
    assert rep.cp and rep.schur_idempotent and rep.reflexive and rep.real
    rep = axioms(SuperOperator.identity(alg) * -1.0)
    assert not rep.cp
    A = psi_prime_inv(random_projection(alg, rng))
    rep = axioms(A)
    assert rep.cp and rep.schur_idempotent and rep.real


def test_axiom_report_flags_match_residuals(alg, rng):
    rep = axioms(random_superop(alg, rng), 1e-8)
    for flag, res in [("schur_idempotent", "schur_residual"), ("real", "real_residual"),
                      ("reflexive", "reflexive_residual"), ("kms_self_adjoint", "kms_residual"),
                      ("undirected", "undirected_residual")]:
        assert getattr(rep, flag) == (getattr(rep, res) <= 1e-8)


def test_reflexive_graphs(alg, rng):
    e = random_reflexive_projection(alg, rng)
    rep = axioms(psi_prime_inv(e))
    assert rep.reflexive and rep.cp and rep.schur_idempotent


# -- bimodules ---------------------------------------------------------------

def test_bimodule_scalar_case():
    alg = Algebra((1,), [np.array([[0.7]])])
    one = AlgebraElement.one(alg)
    assert bimodule_S(SuperOperator.rank_one(one, one)).dim == 1


def test_bimodule_identity_tracial():
    alg = Algebra((2,))
    S = bimodule_S(SuperOperator.identity(alg))
    R = OperatorSubspace.span(alg, [alg.right_op(E) for E in alg.matrix_units])
    assert S.dim == 4 and S.dist(R) < 1e-10


@pytest.mark.parametrize("blocks", SHAPES)
def test_bimodule_equals_theta_image(blocks, rng):
    alg = random_algebra(blocks, rng)
    for _ in range(3):
        A = psi_prime_inv(random_projection(alg, rng))
        assert bimodule_S(A).dist(theta_image(A)) < 1e-8


# -- twists ------------------------------------------------------------------

def test_twist_trivial_cases(alg, rng):
    S = bimodule_S(psi_prime_inv(random_projection(alg, rng)))
    assert twist(S, 0).dist(S) < 1e-10
    t = Algebra(alg.blocks)
    St = OperatorSubspace(t, S.cols)
    assert twist(St, 0.25j).dist(St) < 1e-10
    assert twist(twist(S, 0.3j + 0.2), -(0.3j + 0.2)).dist(S) < 1e-8


@pytest.mark.parametrize("blocks", SHAPES)
def test_q_twist_equals_nabla_twist(blocks, rng):
    alg = random_algebra(blocks, rng)
    for _ in range(5):
        S = bimodule_S(psi_prime_inv(random_projection(alg, rng)))
        for z in (0.25j, -0.25j, 0.5j, 0.7):
            assert twist(S, z).dist(nabla_twist(S, z)) < 1e-8


@pytest.mark.parametrize("blocks", SHAPES)
def test_twisted_membership(blocks, rng):
    alg = random_algebra(blocks, rng)
    for _ in range(5):
        A = psi_prime_inv(random_projection(alg, rng))
        T = twist(bimodule_S(A), 0.25j)
        for X in T.basis:
            assert fro(twisted_theta(A, X) - X) < 1e-8
        # elements outside T are moved
        Y = ginibre(rng, alg.dim)
        out = Y - (T.cols @ (T.cols.conj().T @ Y.reshape(-1))).reshape(Y.shape)
        if fro(out) > 1e-6:
            assert fro(twisted_theta(A, out) - out) > 1e-6


@pytest.mark.parametrize("blocks", SHAPES)
def test_reflexivity_transfers_to_twist(blocks, rng):
    alg = random_algebra(blocks, rng)
    eye = np.eye(alg.dim)
    for make in (random_reflexive_projection, random_projection):
        e = make(alg, rng)
        S = bimodule_S(psi_prime_inv(e))
        T = twist(S, 0.25j)
        assert S.contains(eye) == T.contains(eye)
    assert bimodule_S(psi_prime_inv(random_reflexive_projection(alg, rng))).contains(eye)


# -- KMS and swap ------------------------------------------------------------

def test_kms_adjoint_tracial(rng):
    alg = Algebra((1, 2))
    A = random_superop(alg, rng)
    assert kms_adjoint(A).dist(A.adjoint()) < 1e-12 * fro(A.matrix)


def test_kms_pairing(alg, rng):
    for _ in range(20):
        A = random_superop(alg, rng)
        a, b = random_element(alg, rng).mat, random_element(alg, rng).mat
        Ha, Hk = A.hom, kms_adjoint(A).hom
        Aa = alg.unvec(Ha @ alg.vec(a))
        AKb = alg.unvec(Hk @ alg.vec(b))
        lhs, rhs = kms_inner(alg, a, AKb), kms_inner(alg, Aa, b)
        assert abs(lhs - rhs) < 1e-9 * (1 + abs(lhs))
        assert kms_adjoint(kms_adjoint(A)).dist(A) < 1e-9 * fro(A.matrix)


def test_kms_self_adjoint_for_symmetric_projection(alg, rng):
    e = random_symmetric_projection(alg, rng)
    assert (e - tensor_swap(e)).norm() < 1e-9
    A = psi_prime_inv(e)
    assert kms_adjoint(A).dist(A) < 1e-8


def test_tensor_swap_examples(alg, rng):
    one = TensorElement.one(alg)
    assert (tensor_swap(one) - one).norm() == 0
    b, c = random_element(alg, rng), random_element(alg, rng)
    assert (tensor_swap(TensorElement.simple(b, c)) - TensorElement.simple(c, b)).norm() < 1e-12
    e = random_tensor(alg, rng)
    assert (tensor_swap(tensor_swap(e)) - e).norm() == 0
    assert (tensor_swap(e).adjoint() - tensor_swap(e.adjoint())).norm() < 1e-12
    f = random_tensor(alg, rng)
    # anti-homomorphism
    assert (tensor_swap(e @ f) - tensor_swap(f) @ tensor_swap(e)).norm() < 1e-10 * (e @ f).norm()


def test_kms_adjoint_corresponds_to_swap(alg, rng):
    for _ in range(10):
        A = random_superop(alg, rng)
        lhs = psi_prime(kms_adjoint(A))
        assert (lhs - tensor_swap(psi_prime(A)).adjoint()).norm() < 1e-9 * lhs.norm()
        # for self-adjoint e this is τ(e) itself
        e = random_tensor(alg, rng)
        e = e + e.adjoint()
        A = psi_prime_inv(e)
        assert (psi_prime(kms_adjoint(A)) - tensor_swap(e)).norm() < 1e-9 * e.norm()


# -- Hilbert-space forms -------------------------------------------------------

def test_hilbert_forms_identity(alg):
    rep = hilbert_form_relations(SuperOperator.identity(alg))
    assert rep.swap_vs_J < 1e-10 and rep.J_vs_nabla < 1e-10


@pytest.mark.parametrize("blocks", SHAPES)
def test_hilbert_forms_random(blocks, rng):
    alg = random_algebra(blocks, rng)
    for _ in range(5):
        rep = hilbert_form_relations(psi_prime_inv(random_projection(alg, rng)))
        assert rep.swap_vs_J < 1e-8 and rep.J_vs_nabla < 1e-8


def test_hilbert_forms_tracial(rng):
    alg = Algebra((2,))
    A = psi_prime_inv(random_projection(alg, rng))
    A_tau = psi_prime_inv(tensor_swap(psi_prime(A)))
    P = alg.transpose_perm
    # J X* J = P X^T P
    assert fro(A_tau.matrix - P @ A.matrix.T @ P) < 1e-10


def test_hilbert_forms_requires_real(alg, rng):
    with pytest.raises(NotReal):
        hilbert_form_relations(random_superop(alg, rng) * 1j)


@given(st.integers(0, 2**32 - 1), st.sampled_from(SHAPES))
def test_property_bijection(seed, blocks):
    rng = np.random.default_rng(seed)
    alg = random_algebra(blocks, rng)
    e = random_projection(alg, rng)
    A = psi_prime_inv(e)
    rep = axioms(A, 1e-8)
    assert rep.cp and rep.schur_idempotent and rep.real
    assert (psi_prime(A) - e).norm() < 1e-9
