#!/usr/bin/env python3
"""Recompute every headline number and print the pass/fail table.

Exit status is 0 only if every row lands inside its tolerance, so this
doubles as a regression gate:

    python scripts/reproduce_headline_numbers.py
    python scripts/reproduce_headline_numbers.py --f-active 0.3   # breaks
"""

import argparse
import sys

from spinpair.repro import format_repro_table, paper_repro
from spinpair.states import SpinSystemParams


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--f-active", type=float, default=0.368)
    ap.add_argument("--temp-k", type=float, default=295.0)
    ap.add_argument("--n-random-states", type=int, default=1000)
    args = ap.parse_args()

    params = SpinSystemParams(f_active=args.f_active, temp_k=args.temp_k)
    rows, ok = paper_repro(params, n_random_states=args.n_random_states)
    print(format_repro_table(rows), end="")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
