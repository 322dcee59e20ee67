"""JSON graph specs and the ``qg`` command line.

Spec layout::

    {"algebra": {"blocks": [2], "Q": [<block matrix>, ...],
                 "normalize_Q_inverse_trace": false},
     "<representation>": ...,
     "seed": 7}

Exactly one representation key is present:

* ``adjacency``:  dim×dim superoperator matrix on L²(B) (matrix-unit basis)
* ``projection``: list of {"i", "j", "matrix"} block components of e
* ``subspace``:   list of dim×dim matrices spanning V ⊆ HS(L²(B))
* ``relation``:   {"n", "weights", "edges"} (atomic case; the algebra key is optional)

Complex matrices are nested lists of [re, im] pairs.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import Algebra, TensorElement
from .atomic_graphs import WeightedRelation, embed
from .errors import InvalidSpec, NotInvariant, NotProjection, QGraphError
from .linalg_core import Tolerance
from .quantum_graph import (SuperOperator, axioms, bimodule_S, psi_prime, psi_prime_inv, twist)
from .relation_space import HsSubspace, degree, image_V, subspace_to_e

REPRESENTATIONS = ("adjacency", "projection", "subspace", "relation")
EXIT_OK, EXIT_AXIOM, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
SUPEROPERATOR_DIM_LIMIT = 18
AXIOM_DIM_LIMIT = 128


# ---------------------------------------------------------------------------
# complex matrices <-> JSON

def enc_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def dec_matrix(obj) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidSpec(f"matrix is not a nested list of [re, im] pairs: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise InvalidSpec("matrix must have shape rows x cols x 2")
    return arr[..., 0] + 1j * arr[..., 1]


def dumps(obj) -> str:
    # json emits floats with repr(), the shortest string that round-trips exactly
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------

@dataclass
class GraphSpec:
    algebra: Algebra
    kind: str
    data: object            # SuperOperator | TensorElement | HsSubspace | WeightedRelation
    seed: Optional[int] = None

    def to_json(self) -> dict:
        a = self.algebra
        out = {"algebra": {"blocks": list(a.blocks), "Q": [enc_matrix(q) for q in a.Q_blocks],
                           "normalize_Q_inverse_trace": False}}
        if self.kind == "adjacency":
            out["adjacency"] = enc_matrix(self.data.matrix)
        elif self.kind == "projection":
            out["projection"] = [{"i": i, "j": j, "matrix": enc_matrix(c)}
                                 for (i, j), c in sorted(self.data.comps.items())]
        elif self.kind == "subspace":
            out["subspace"] = [enc_matrix(X) for X in self.data.basis]
        elif self.kind == "relation":
            out["relation"] = self.data.to_json()
        if self.seed is not None:
            out["seed"] = int(self.seed)
        return out


def parse_spec(obj: dict, tol: Tolerance | None = None) -> GraphSpec:
    if not isinstance(obj, dict):
        raise InvalidSpec("spec must be a JSON object")
    present = [k for k in REPRESENTATIONS if k in obj]
    if len(present) != 1:
        raise InvalidSpec(f"exactly one representation required, found {present}")
    kind = present[0]
    seed = obj.get("seed")
    if kind == "relation":
        R = WeightedRelation.from_json(obj["relation"])
        alg, _ = embed(R)
        return GraphSpec(alg, kind, R, seed)
    try:
        a = obj["algebra"]
        blocks = [int(b) for b in a["blocks"]]
        Q = [dec_matrix(q) for q in a["Q"]] if "Q" in a else None
        norm = bool(a.get("normalize_Q_inverse_trace", False))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSpec(f"bad algebra section: {exc}") from exc
    alg = Algebra(blocks, Q, tol or Tolerance(), normalize_inverse_trace=norm)
    d = alg.dim
    if kind == "adjacency":
        M = dec_matrix(obj["adjacency"])
        if M.shape != (d, d):
            raise InvalidSpec(f"adjacency must be {d}x{d}")
        data = SuperOperator(alg, M)
    elif kind == "projection":
        comps = {}
        try:
            for c in obj["projection"]:
                comps[(int(c["i"]), int(c["j"]))] = dec_matrix(c["matrix"])
        except (KeyError, TypeError) as exc:
            raise InvalidSpec(f"bad projection component: {exc}") from exc
        if any(not (0 <= i < len(blocks) and 0 <= j < len(blocks)) for i, j in comps):
            raise InvalidSpec("projection component index out of range")
        data = TensorElement(alg, comps)
    else:
        mats = [dec_matrix(X) for X in obj["subspace"]]
        if any(X.shape != (d, d) for X in mats):
            raise InvalidSpec(f"subspace vectors must be {d}x{d}")
        data = HsSubspace.span(alg, mats)
    return GraphSpec(alg, kind, data, seed)


def to_projection(spec: GraphSpec) -> TensorElement:
    if spec.kind == "projection":
        return spec.data
    if spec.kind == "adjacency":
        return psi_prime(spec.data)
    if spec.kind == "subspace":
        return subspace_to_e(spec.data)
    return embed(spec.data)[1]


def convert(spec: GraphSpec, target: str) -> GraphSpec:
    if target not in ("adjacency", "projection", "subspace"):
        raise InvalidSpec(f"unknown target {target!r}")
    if target == spec.kind:
        return spec
    e = to_projection(spec)
    if target == "projection":
        return GraphSpec(spec.algebra, target, e, spec.seed)
    if target == "adjacency":
        return GraphSpec(spec.algebra, target, psi_prime_inv(e), spec.seed)
    return GraphSpec(spec.algebra, target, image_V(e), spec.seed)


# ---------------------------------------------------------------------------
# commands

def verify(spec: GraphSpec, tol: float = 1e-8) -> dict:
    e = to_projection(spec)
    res = e.projection_residual()
    if res > tol * max(1.0, e.norm()):
        raise NotProjection(f"e is not a projection (residual {res:.3e})")
    alg = spec.algebra
    out = {"axioms": {}}
    # the bimodule (for irreducibility) costs dim^4 memory; the axioms only dim^3
    if alg.dim <= AXIOM_DIM_LIMIT:
        A = psi_prime_inv(e)
        rep = axioms(A, tol)
        out["axioms"] = {k: (bool(v) if isinstance(v, (bool, np.bool_)) else float(v))
                         for k, v in rep.as_dict().items()}
    if alg.dim <= SUPEROPERATOR_DIM_LIMIT:
        from .tracial_transport import is_irreducible
        T = twist(bimodule_S(A), 0.25j)
        out["irreducible"] = bool(is_irreducible(T)) if T.dim else False
    deg = degree(e)
    out["degree"] = {"norm": deg.norm, "elem_diag": [float(x.real) for x in np.diag(deg.elem.mat)]}
    out["projection_residual"] = float(res)
    return out


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}{k}.")
    else:
        yield prefix[:-1], obj


def verify_text(report: dict) -> str:
    """One ``key: value`` line per leaf of the JSON report."""
    return "\n".join(f"{k}: {json.dumps(v)}" for k, v in _flatten(report))


def random_spec(blocks, rank=None, seed=0, q_mode="random", q_file=None) -> GraphSpec:
    from .sampling import random_positive, random_projection, rng_of
    rng = rng_of(seed)
    if q_mode == "identity":
        Q = None
    elif q_mode == "random":
        Q = [random_positive(rng, n) for n in blocks]
    elif q_mode == "file":
        if q_file is None:
            raise InvalidSpec("--q file needs --q-file")
        with open(q_file) as fh:
            Q = [dec_matrix(q) for q in json.load(fh)]
    else:
        raise InvalidSpec(f"unknown Q mode {q_mode!r}")
    alg = Algebra(blocks, Q)
    e = random_projection(alg, rng, rank)
    return GraphSpec(alg, "projection", e, seed)


def tracial_report(spec: GraphSpec) -> dict:
    from .tracial_transport import (left_data, property_trio, tracial_reference, transport_bimodule)
    alg = spec.algebra
    e = to_projection(spec)
    ref = tracial_reference(alg)
    A_tr = psi_prime_inv(TensorElement(ref, e.comps))
    S_tr = left_data(bimodule_S(A_tr))
    T_phi = transport_bimodule(alg, S_tr, "T")
    trio = property_trio(alg, S_tr)
    return {"A_Tr": enc_matrix(A_tr.hom), "S_Tr": [enc_matrix(x) for x in S_tr.basis],
            "T_phi": [enc_matrix(x) for x in T_phi.basis], "property_trio": trio.as_dict()}


# -- the M₂ connectivity example -------------------------------------------

M2_Q_INV_HALF = np.array([[1.0, 1.0], [1.0, 3.0]])
M2_GENERATORS = (np.diag([1.0, 2.0]), np.array([[0.0, 1.0], [1.0, 1.0]]))


def m2_connectivity(tol: float = 1e-9, perturb: float = 0.0) -> dict:
    from .linalg_core import generated_algebra_dim, matrix_power
    from .tracial_transport import MatrixSubspace, common_eigenvectors, transport_bimodule
    Q = np.linalg.inv(M2_Q_INV_HALF @ M2_Q_INV_HALF) + perturb * np.eye(2)
    alg = Algebra((2,), Q)
    S_tr = MatrixSubspace.span(list(M2_GENERATORS))
    tr_dim = generated_algebra_dim(S_tr.basis)
    T_phi = transport_bimodule(alg, S_tr, "T")
    phi_dim = generated_algebra_dim(T_phi.basis)
    target = np.array([2.0, 4.0])
    witness, witness_res = None, np.inf
    for v in common_eigenvectors(T_phi.basis, tol=max(tol, 1e-9)):
        w = alg.qpow(-0.25) @ v
        k = int(np.argmax(np.abs(w)))
        w = w * (target[k] / w[k]) if abs(w[k]) > 0 else w
        r = float(np.abs(w - target).max())
        if r < witness_res:
            witness, witness_res = w, r
    # both generators send Q^{1/2}(2,4) = (1,1) to (1,2) = ½(2,4)
    base = matrix_power(alg.Q, 0.5) @ target
    images = [g @ base for g in M2_GENERATORS]
    image_res = max(float(np.abs(im - 0.5 * target).max()) for im in images)
    base_res = float(np.abs(base - np.ones(2)).max())
    checks = {
        "tracial_irreducible": tr_dim == 4,
        "phi_reducible": phi_dim < 4,
        "witness": witness_res <= tol,
        "generator_images": image_res <= tol and base_res <= tol,
    }
    return {
        "tracial_algebra_dim": tr_dim,
        "phi_algebra_dim": phi_dim,
        "witness": None if witness is None else [[float(z.real), float(z.imag)] for z in witness],
        "witness_residual": None if witness is None else float(witness_res),
        "generator_images": [[float(x.real) for x in im] for im in images],
        "generator_image_residual": max(image_res, base_res),
        "checks": checks,
        "pass": all(checks.values()),
    }


def m2_spec() -> GraphSpec:
    """The M₂ example as a projection spec.

    Its tracial bimodule is spanned by the two generators, so V⁰ is their span
    and e is the orthogonal projection onto it in ℂ²⊗conj(ℂ²).
    """
    from .linalg_core import projector, span_basis
    Q = np.linalg.inv(M2_Q_INV_HALF @ M2_Q_INV_HALF)
    alg = Algebra((2,), Q)
    P = projector(span_basis(np.array([g.reshape(-1) for g in M2_GENERATORS])))
    return GraphSpec(alg, "projection", TensorElement(alg, {(0, 0): P}))


# ---------------------------------------------------------------------------

def _load(path: str, tol: Tolerance | None = None) -> GraphSpec:
    try:
        with (sys.stdin if path == "-" else open(path)) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidSpec(f"cannot read spec: {exc}") from exc
    return parse_spec(obj, tol)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qg", description="finite quantum graph toolkit")
    sub = p.add_subparsers(dest="cmd", required=True)
    c = sub.add_parser("convert", help="convert between representations")
    c.add_argument("--to", required=True, choices=["adjacency", "projection", "subspace"])
    c.add_argument("spec")
    v = sub.add_parser("verify", help="check the quantum adjacency axioms")
    v.add_argument("spec")
    v.add_argument("--tol", type=float, default=1e-8)
    v.add_argument("--require", default="cp,schur_idempotent",
                   help="comma separated axioms that must hold for exit code 0")
    v.add_argument("--text", action="store_true", help="human readable output")
    r = sub.add_parser("random", help="random projection spec")
    r.add_argument("--blocks", required=True)
    r.add_argument("--rank", type=int, default=None)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--q", dest="q_mode", default="random", choices=["random", "identity", "file"])
    r.add_argument("--q-file", default=None)
    t = sub.add_parser("tracial", help="tracial reference graph and transport properties")
    t.add_argument("spec")
    rp = sub.add_parser("repro", help="reproduce a worked example")
    rp.add_argument("name", choices=["m2-connectivity"])
    rp.add_argument("--tol", type=float, default=1e-9)
    rp.add_argument("--perturb", type=float, default=0.0)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "convert":
            out = convert(_load(args.spec), args.to).to_json()
            code = EXIT_OK
        elif args.cmd == "verify":
            rep = verify(_load(args.spec), args.tol)
            required = [s for s in args.require.split(",") if s]
            unknown = [s for s in required if s not in rep["axioms"]]
            if unknown:
                raise InvalidSpec(f"unknown axioms {unknown}")
            rep["required"] = required
            rep["pass"] = all(rep["axioms"][s] for s in required)
            code = EXIT_OK if rep["pass"] else EXIT_AXIOM
            if args.text:
                print(verify_text(rep))
                return code
            out = rep
        elif args.cmd == "random":
            blocks = [int(b) for b in args.blocks.split(",")]
            out = random_spec(blocks, args.rank, args.seed, args.q_mode, args.q_file).to_json()
            code = EXIT_OK
        elif args.cmd == "tracial":
            out = tracial_report(_load(args.spec))
            code = EXIT_OK
        else:
            out = m2_connectivity(args.tol, args.perturb)
            code = EXIT_OK if out["pass"] else EXIT_AXIOM
            if not out["pass"]:
                failed = [k for k, ok in out["checks"].items() if not ok]
                print(f"assertion failed: {failed[0]}", file=sys.stderr)
    except (InvalidSpec, NotProjection, NotInvariant) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except QGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(dumps(out))
    return code


if __name__ == "__main__":
    sys.exit(main())
