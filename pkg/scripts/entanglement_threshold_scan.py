#!/usr/bin/env python3
"""Map out where entanglement survives mixing.

Two sweeps:
  1. Werner line: singlet polarization eps from 0 to 1, locating the
     partial-transpose zero crossing by bisection (expected at 1/3).
  2. (a, x) plane: singlet fraction a against triplet imbalance x, where
     pT0 = (1-a) x and the remaining weight splits evenly over T+1/T-1.
     Writes a CSV grid of min-PT eigenvalues plus the verdict.

The plane's verdict only depends on whether some Bell population clears
1/2, which on the x <= 1/2 slice reduces to a > 1/2.
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from spinpair.analysis import min_pt_eigenvalue, singlet_mixture_entangled
from spinpair.states import bell_diagonal, make_pseudo_pure, make_singlet


def werner_crossing(tol: float = 1e-12) -> float:
    s = make_singlet()

    def mpt(eps: float) -> float:
        return min_pt_eigenvalue(make_pseudo_pure(eps, s).matrix)

    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mpt(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="entanglement_scan.csv")
    ap.add_argument("--grid", type=int, default=51)
    args = ap.parse_args()

    cross = werner_crossing()
    print(f"Werner partial-transpose crossing: eps = {cross:.12f} "
          f"(deviation from 1/3: {abs(cross - 1 / 3):.2e})")

    n = args.grid
    rows = []
    exceptions = 0
    for a in np.linspace(0.0, 1.0, n):
        for x in np.linspace(0.0, 1.0, n):
            rest = 1.0 - a
            rho = bell_diagonal(a, rest * x, rest * (1 - x) / 2,
                                rest * (1 - x) / 2)
            mpt = min_pt_eigenvalue(rho.matrix)
            verdict = singlet_mixture_entangled(float(a), float(x))
            rows.append((float(a), float(x), mpt, int(verdict)))
            if x <= 0.5 and verdict != (a > 0.5):
                exceptions += 1

    out = Path(args.out)
    with out.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["singlet_fraction", "t0_weight", "min_pt_eigenvalue",
                    "entangled"])
        w.writerows(rows)
    print(f"{out}: {len(rows)} grid points")
    print(f"exceptions to the a > 1/2 rule on the x <= 1/2 slice: {exceptions}")


if __name__ == "__main__":
    main()
