"""Degree of the order relation i ∼ j ⇔ j ≥ i at increasing truncations.

Summable weights 2^{-j} keep the degree below 2; uniform weights give degree N.
"""
import argparse
from dataclasses import dataclass

from qgraph.atomic_graphs import atomic_degree, embed, order_relation
from qgraph.relation_space import degree


@dataclass
class Config:
    sizes: tuple = (5, 10, 20, 50, 100, 200)


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--sizes", default=",".join(map(str, Config.sizes)))
    cfg = Config(tuple(int(s) for s in p.parse_args().sizes.split(",")))
    print(f"{'N':>5} {'deg(2^-j)':>22} {'deg(1)':>8}  embedded check")
    for N in cfg.sizes:
        half = order_relation(tuple(2.0 ** -j for j in range(N)))
        flat = order_relation((1.0,) * N)
        d_half = atomic_degree(half).max()
        d_flat = atomic_degree(flat).max()
        agrees = abs(degree(embed(half)[1]).norm - d_half) <= 1e-12
        print(f"{N:5d} {d_half:22.17f} {d_flat:8.0f}  {agrees}")


if __name__ == "__main__":
    main()
