"""Finite-dimensional quantum graphs over B = ⊕ M_n with a faithful state φ = Tr(Q·)."""
from .algebra import (Algebra, AlgebraElement, GnsVector, TensorElement, commutant_basis,
                      gns_inverse, gns_lambda, modular_J, modular_nabla, mult_maps, new_algebra,
                      sigma_z, state_phi)
from .errors import *  # noqa: F401,F403
from .linalg_core import (Tolerance, generated_algebra_dim, herm_eig, matrix_power,
                          orthonormalize)
from .quantum_graph import (AxiomReport, OperatorSubspace, SuperOperator, as_map_on_B, axioms,
                            bimodule_S, hilbert_form_relations, kms_adjoint, psi_prime,
                            psi_prime_inv, schur_product, tensor_swap, theta_apply, twist)

__version__ = "0.1.0"
