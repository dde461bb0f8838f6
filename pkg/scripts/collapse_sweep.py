#!/usr/bin/env python3
"""Sweep collapse times over alphabet sizes and lengths.

For each (C, M) cell: sample uniform rows, difference until everything is 0 or
1, and tabulate the median collapse iteration with the collapsed fraction.
"""

import argparse

from gilbreath.experiments import ExperimentConfig, run_collapse_experiment


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alphabets", default="3,4,5,6")
    ap.add_argument("--lengths", default="1000,10000,100000")
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    alphabets = [int(t) for t in args.alphabets.split(",")]
    lengths = [int(t) for t in args.lengths.split(",")]
    print(f"{'C':>3} {'M':>8} {'collapsed':>10} {'median_it':>10} {'ci':>18}")
    for C in alphabets:
        for M in lengths:
            cfg = ExperimentConfig(kind="uniform_collapse", M=M, trials=args.trials,
                                   seed=args.seed, C=C)
            rec = run_collapse_experiment(cfg, threads=args.threads)
            agg = rec.aggregate
            ci = f"[{agg['ci_low']:.3f},{agg['ci_high']:.3f}]"
            print(f"{C:>3} {M:>8} {agg['collapsed']:>7}/{args.trials:<3}"
                  f"{agg['median_collapse']:>9} {ci:>18}  ({rec.wall_time:.2f}s)")


if __name__ == "__main__":
    main()
