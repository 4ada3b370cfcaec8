"""Label the standard regime scenarios over a range of initial imbalances and locate swap transitions.

    python scripts/reproduce_regimes.py [--t-end 100] [--n 7] [--out regimes.csv]
"""
import argparse
import csv
import math
import sys

import numpy as np

from bjjmix import (Control, IntegratorConfig, ModelParams, NoTransition, integrate, opposite_well_family,
                    same_well_family, swap_transition_scan)
from bjjmix.classify import classify_lenient

RATIO = 2.13


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t-end", type=float, default=100.0)
    ap.add_argument("--n", type=int, default=7, help="initial imbalances in [0.05, 0.2]")
    ap.add_argument("--ic-ratio", type=float, default=0.9, help="Z_b(0) / Z_a(0) for same-well ICs")
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)

    zero_ic = same_well_family(args.ic_ratio)
    pi_ic = same_well_family(1.0, math.pi)
    cases = [(L, "zero", zero_ic) for L in (0.6, 1.8, 2.0, 2.3, 2.5)] + [(L, "pi", pi_ic) for L in (0.6, 0.8)]
    cfg = IntegratorConfig(t_end=args.t_end)
    rows = []
    for L, kind, fam in cases:
        p = ModelParams.symmetric(L, RATIO)
        for z in np.linspace(0.05, 0.2, args.n):
            lab, amb = classify_lenient(integrate(p, fam(z), cfg))
            rows.append(dict(Lambda=L, ic=kind, Z0=round(float(z), 6), phase_a=lab.phase_class[0].value,
                             phase_b=lab.phase_class[1].value, trapping=lab.trapping.value, ambiguous=amb,
                             mean_Z_a=lab.mean_Z_a, mean_Z_b=lab.mean_Z_b, corr_ZZ=lab.corr_ZZ))
            print(f"L={L:<4} {kind:<4} Z0={z:.3f}  {lab.trapping.value:<18} "
                  f"<Za>={lab.mean_Z_a:+.3f} <Zb>={lab.mean_Z_b:+.3f}{'  ?' if amb else ''}")

    scans = [
        ("Lambda in [2.3, 2.5], Z0=0.1", ModelParams.symmetric(2.3), zero_ic, Control.LAMBDA, 2.3, 2.5),
        ("Z0 in [0.05, 0.2], Lambda=2.0", ModelParams.symmetric(2.0), zero_ic, Control.INITIAL_IMBALANCE, 0.05, 0.2),
        ("opposite-well pi Z0 in [0.1, 0.5], Lambda=0.8", ModelParams.symmetric(0.8), opposite_well_family(),
         Control.INITIAL_IMBALANCE, 0.1, 0.5),
    ]
    for name, p, fam, control, lo, hi in scans:
        try:
            tr = swap_transition_scan(p, fam, control, lo, hi, ratio=RATIO, icfg=cfg)
            print(f"{name}: {tr.below.trapping.value} -> {tr.above.trapping.value} at {tr.value:.5f}")
        except NoTransition as e:
            print(f"{name}: {e}")

    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
