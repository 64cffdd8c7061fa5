#!/usr/bin/env python3
"""Full-size benchmark: 25 contexts x 25 variables, budgets up to 25 000,
all explorers. This is the long-running job (hours at 10 000 runs); the
acceptance suite covers the same comparisons at desk scale."""

import argparse

from ccbandits.bench import SweepSpec, sweep, write_reports_csv


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--grid", default="1000,5000,10000,15000,20000,25000")
    parser.add_argument("--algos", default="convexplore,unif,ucb,ts,rr-ucb,rr-ts")
    parser.add_argument("--eps", type=float, default=0.3)
    parser.add_argument("--m", type=int, default=2)
    parser.add_argument("--runs", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=2)
    parser.add_argument("--out", default="full_scale.csv")
    args = parser.parse_args()

    spec = SweepSpec(
        axis="budget",
        grid=tuple(int(v) for v in args.grid.split(",")),
        n=25,
        k=25,
        eps=args.eps,
        m=args.m,
        seed=args.seed,
        runs=args.runs,
        jobs=args.jobs,
    )
    reports = sweep(spec, args.algos.split(","))
    write_reports_csv(args.out, reports)
    for r in reports:
        print(f"T={r.T:6d} {r.algo:12s} regret={r.mean_regret:.5f}"
              f" +/- {r.stderr:.5f}  prob_best={r.prob_best:.3f}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
