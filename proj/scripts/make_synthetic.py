#!/usr/bin/env python3
"""Generate the bundled synthetic benchmark suite under data/synthetic/.

Three small datasets shaped like the public maintainability corpora:
  uims_like.csv      class-level OO metrics with a CHANGE count target
  mdp_like.csv       function-level metrics; target is MI computed from
                     HALSTEAD_VOLUME, CYCLOMATIC_COMPLEXITY, LOC_TOTAL
  promise_like.arff  ARFF with a nominal attribute and a CHANGE target

Output is deterministic for a given --seed.
"""
import argparse
import math
from pathlib import Path

import numpy as np


def uims_like(rng, n=71):
    wmc = rng.integers(1, 40, n)
    nom = np.maximum(1, (wmc * rng.uniform(0.4, 0.9, n)).astype(int))
    dit = rng.integers(1, 6, n)
    noc = rng.poisson(0.8, n)
    mpc = rng.integers(0, 30, n)
    rfc = nom + mpc + rng.integers(0, 10, n)
    lcom = rng.integers(0, 60, n)
    dac = rng.poisson(1.5, n)
    size1 = (wmc * rng.uniform(6, 14, n)).astype(int) + rng.integers(5, 40, n)
    size2 = nom + rng.integers(1, 15, n)
    change = 0.9 * wmc + 0.08 * size1 + 0.6 * mpc + 2.0 * dac + rng.normal(0, 4, n)
    change = np.maximum(0, np.round(change)).astype(int)
    cols = dict(DIT=dit, NOC=noc, MPC=mpc, RFC=rfc, LCOM=lcom, DAC=dac, WMC=wmc, NOM=nom,
                SIZE1=size1, SIZE2=size2, CHANGE=change)
    return cols


def mdp_like(rng, n=240):
    loc = rng.integers(5, 400, n)
    g = np.maximum(1, np.round(loc / rng.uniform(8, 25, n))).astype(int)
    eta1 = rng.integers(5, 30, n)
    eta2 = np.maximum(2, np.round(loc * rng.uniform(0.2, 0.8, n))).astype(int)
    n_ops = np.round(loc * rng.uniform(2.0, 4.0, n)).astype(int)
    n_opnds = np.round(n_ops * rng.uniform(0.6, 0.9, n)).astype(int)
    volume = (n_ops + n_opnds) * np.log2(eta1 + eta2)
    comments = np.round(loc * rng.uniform(0.0, 0.3, n)).astype(int)
    blank = np.round(loc * rng.uniform(0.05, 0.2, n)).astype(int)
    cols = dict(LOC_BLANK=blank, LOC_COMMENTS=comments, LOC_EXECUTABLE=loc - comments,
                NUM_OPERATORS=n_ops, NUM_OPERANDS=n_opnds, NUM_UNIQUE_OPERATORS=eta1,
                NUM_UNIQUE_OPERANDS=eta2, BRANCH_COUNT=2 * g - 1,
                HALSTEAD_VOLUME=np.round(volume, 4), CYCLOMATIC_COMPLEXITY=g, LOC_TOTAL=loc)
    return cols


def write_csv(path, cols):
    names = list(cols)
    with open(path, "w", newline="\n") as f:
        f.write(",".join(names) + "\n")
        for i in range(len(cols[names[0]])):
            f.write(",".join(str(cols[c][i]) for c in names) + "\n")


def promise_like(rng, path, n=120):
    kinds = ["util", "gui", "io", "core"]
    kind = rng.integers(0, len(kinds), n)
    cbo = rng.integers(0, 25, n)
    wmc = rng.integers(1, 50, n)
    loc = (wmc * rng.uniform(8, 20, n)).astype(int)
    lcom = rng.uniform(0, 1, n)
    npm = rng.integers(0, 30, n)
    change = 0.05 * loc + 0.7 * cbo + 3.0 * (kind == 1) + rng.normal(0, 3, n)
    change = np.maximum(0, np.round(change)).astype(int)
    missing = set(rng.choice(n, 4, replace=False).tolist())
    with open(path, "w", newline="\n") as f:
        f.write("% synthetic PROMISE-style class metrics\n")
        f.write("@relation promise_like\n\n")
        f.write("@attribute kind {" + ",".join(kinds) + "}\n")
        for a in ["cbo", "wmc", "loc", "lcom", "npm", "CHANGE"]:
            f.write(f"@attribute {a} numeric\n")
        f.write("\n@data\n")
        for i in range(n):
            lc = "?" if i in missing else f"{lcom[i]:.4f}"
            f.write(f"{kinds[kind[i]]},{cbo[i]},{wmc[i]},{loc[i]},{lc},{npm[i]},{change[i]}\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=20241016)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "synthetic")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    write_csv(args.out / "uims_like.csv", uims_like(rng))
    write_csv(args.out / "mdp_like.csv", mdp_like(rng))
    promise_like(rng, args.out / "promise_like.arff")


if __name__ == "__main__":
    main()
