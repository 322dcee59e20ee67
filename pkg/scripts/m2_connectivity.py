"""Connectivity is not preserved by changing the state: the M₂ example.

Prints the tracial and φ-side generated algebra dimensions, the common
eigenvector witness and the generator images, then sweeps a perturbation
Q + εI to show where the φ-graph becomes connected again.
"""
import argparse
import json
from dataclasses import dataclass, asdict

import numpy as np

from qgraph.io_cli import m2_connectivity


@dataclass
class Config:
    tol: float = 1e-9
    eps_max: float = 0.5
    steps: int = 11


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--tol", type=float, default=Config.tol)
    p.add_argument("--eps-max", type=float, default=Config.eps_max)
    p.add_argument("--steps", type=int, default=Config.steps)
    cfg = Config(**{k.replace("-", "_"): v for k, v in vars(p.parse_args()).items()})

    rep = m2_connectivity(cfg.tol)
    print(json.dumps({"config": asdict(cfg), "example": rep}, indent=2))
    print("\n  eps    phi-dim  connected")
    for eps in np.linspace(0.0, cfg.eps_max, cfg.steps):
        r = m2_connectivity(cfg.tol, float(eps))
        print(f"  {eps:.3f}  {r['phi_algebra_dim']:7d}  {r['phi_algebra_dim'] == 4}")


if __name__ == "__main__":
    main()
