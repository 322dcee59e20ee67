"""Random projections e through A, V and S and back; prints worst residuals per block shape."""
import argparse
import time
from dataclasses import dataclass

from qgraph.quantum_graph import axioms, bimodule_S, psi_prime, psi_prime_inv
from qgraph.relation_space import S_from_V, V_from_S, image_V, subspace_to_e
from qgraph.sampling import random_algebra, random_projection, rng_of


@dataclass
class Config:
    samples: int = 25
    seed: int = 0
    shapes: tuple = ((2,), (3,), (1, 2), (2, 2), (1, 1, 2))


def run(cfg: Config):
    rng = rng_of(cfg.seed)
    for shape in cfg.shapes:
        t0 = time.perf_counter()
        worst = {"choi": 0.0, "schur": 0.0, "psi": 0.0, "e-V": 0.0, "V-S": 0.0, "S-A": 0.0}
        for _ in range(cfg.samples):
            alg = random_algebra(shape, rng)
            e = random_projection(alg, rng)
            A = psi_prime_inv(e)
            rep = axioms(A)
            worst["choi"] = min(worst["choi"], rep.cp_min_eig)
            worst["schur"] = max(worst["schur"], rep.schur_residual)
            worst["psi"] = max(worst["psi"], (psi_prime(A) - e).norm())
            V = image_V(e)
            worst["e-V"] = max(worst["e-V"], (subspace_to_e(V) - e).norm())
            S = S_from_V(V)
            worst["V-S"] = max(worst["V-S"], V_from_S(S).dist(V))
            worst["S-A"] = max(worst["S-A"], S.dist(bimodule_S(A)))
        dt = time.perf_counter() - t0
        cells = "  ".join(f"{k} {v:+.1e}" for k, v in worst.items())
        print(f"{str(shape):10s} {cells}  ({dt:.2f}s)")


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--samples", type=int, default=Config.samples)
    p.add_argument("--seed", type=int, default=Config.seed)
    a = p.parse_args()
    run(Config(a.samples, a.seed))


if __name__ == "__main__":
    main()
