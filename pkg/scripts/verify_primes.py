#!/usr/bin/env python3
"""Verify the prime difference triangle at increasing limits.

The stabilization row at each limit is a recorded observation, not an asserted
constant; this script is how those values get logged.
"""

import argparse
import time

from gilbreath.primes import verify_gilbreath


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--limits", default="10000,100000,1000000,10000000")
    ap.add_argument("--max-full-rows", type=int, default=10_000)
    args = ap.parse_args()

    print(f"{'N':>12} {'status':>12} {'stab_row':>9} {'rows':>10} {'time':>8}")
    for limit in (int(t) for t in args.limits.split(",")):
        t0 = time.perf_counter()
        v = verify_gilbreath(limit, max_full_rows=args.max_full_rows)
        dt = time.perf_counter() - t0
        print(f"{limit:>12} {v.status:>12} {str(v.stabilization_row):>9} "
              f"{v.verified_rows:>10} {dt:>7.2f}s")


if __name__ == "__main__":
    main()
