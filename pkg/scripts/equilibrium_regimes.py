"""Stationary correlations with uniform and with mixed gain/loss ratios.

With g/γ equal on every trap the equilibrium is thermal and diagonal for any
dephasing; changing one trap's ratio makes it coherent and Γ-dependent.

    python3 scripts/equilibrium_regimes.py --out results/equilibrium
"""
import argparse
from pathlib import Path

import numpy as np

from lindnet.io import write_csv, write_matrix_csv
from lindnet.netmodel import fig2_chain, fig3_chain
from lindnet.spectral import equilibrium


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/equilibrium"))
    ap.add_argument("--gammas", type=float, nargs="+", default=[0.0, 0.25, 1.0, 5.0, 100.0])
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    rows = []
    for name, build in (("uniform", fig2_chain), ("mixed", fig3_chain)):
        for g in args.gammas:
            c = equilibrium(build(g)).c_eq
            write_matrix_csv(args.out / f"c_eq_{name}_{g:g}.csv", c)
            off = np.max(np.abs(c - np.diag(np.diag(c))))
            rows.append((name, g, off, float(np.mean(np.diag(c).real))))
            print(f"{name:8s} Gamma={g:<7g} max |off-diag| = {off:.3e}  mean occupation = {rows[-1][3]:.5f}")
    write_csv(args.out / "summary.csv", ["ratios", "gamma", "max_offdiagonal", "mean_occupation"], rows)


if __name__ == "__main__":
    main()
