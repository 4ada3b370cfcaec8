"""Zero- and pi-mode stability of the trivial point over (Lambda_a, Lambda_b), as plot-ready CSV.

    python scripts/stability_map.py --R 1 --lambda-ab 1.0 --n 101 --out stability.csv
"""
import argparse
import sys

import numpy as np

from bjjmix import Mode, stability_region


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--R", type=float, default=1.0, help="K_a / K_b")
    ap.add_argument("--lambda-ab", type=float, default=1.0)
    ap.add_argument("--lo", type=float, default=-2.0)
    ap.add_argument("--hi", type=float, default=4.0)
    ap.add_argument("--n", type=int, default=101)
    ap.add_argument("--out", default="stability.csv")
    args = ap.parse_args(argv)

    g = np.linspace(args.lo, args.hi, args.n)
    zero = stability_region(g, g, args.R, Mode.ZERO, args.lambda_ab)
    pi = stability_region(g, g, args.R, Mode.PI, args.lambda_ab)
    with open(args.out, "w") as fh:
        fh.write("Lambda_a,Lambda_b,zero_stable,pi_stable\n")
        for i, La in enumerate(g):
            for j, Lb in enumerate(g):
                fh.write(f"{La!r},{Lb!r},{int(zero[i, j])},{int(pi[i, j])}\n")
    n = zero.size
    print(f"zero stable {zero.sum()}/{n}, pi stable {pi.sum()}/{n}, both {(zero & pi).sum()}, "
          f"neither {(~zero & ~pi).sum()} -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
