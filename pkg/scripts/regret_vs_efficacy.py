#!/usr/bin/env python3
"""Simple regret at a fixed budget as the instance's exploration efficacy
grows (driven by the per-context threshold recipe)."""

import argparse

from ccbandits.bench import SweepSpec, sweep, write_reports_csv


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=10)
    parser.add_argument("--k", type=int, default=10)
    parser.add_argument("--eps", type=float, default=0.3)
    parser.add_argument("--grid", default="2,3,4,6,8,10", help="threshold recipe values")
    parser.add_argument("--budget", type=int, default=20_000)
    parser.add_argument("--algos", default="convexplore,unif")
    parser.add_argument("--runs", type=int, default=500)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=2)
    parser.add_argument("--out", default="regret_vs_efficacy.csv")
    args = parser.parse_args()

    spec = SweepSpec(
        axis="lambda",
        grid=tuple(int(v) for v in args.grid.split(",")),
        n=args.n,
        k=args.k,
        eps=args.eps,
        seed=args.seed,
        runs=args.runs,
        T=args.budget,
        jobs=args.jobs,
    )
    reports = sweep(spec, args.algos.split(","))
    write_reports_csv(args.out, reports)
    for r in reports:
        print(f"m={r.m:3d} lambda={r.lam:7.2f} {r.algo:12s}"
              f" regret={r.mean_regret:.5f} +/- {r.stderr:.5f}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
