"""Command-line interface: generate instances, compute efficacy, run benchmarks."""

from __future__ import annotations

import argparse
import sys

from . import bench
from .env import load_instance, save_instance, true_transition_matrix
from .optim import lambda_of


def _add_instance_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=10, help="variables per context")
    p.add_argument("--k", type=int, default=10, help="number of intermediate contexts")
    p.add_argument("--eps", type=float, default=0.3, help="reward bump of the best arm")
    p.add_argument("--m", type=int, default=2, help="per-context observational threshold")
    p.add_argument("--seed", type=int, default=0, help="master seed")


def _add_run_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--budget", type=int, required=True, help="rounds per exploration run")
    p.add_argument("--runs", type=int, default=100, help="independent runs to average")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--out", required=True, help="output CSV path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccbandits",
        description="Causal contextual bandits with adaptive context: "
        "simulators, explorers, and benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance file")
    gen.add_argument("--kind", choices=("paper", "lowerbound", "random"), required=True)
    _add_instance_params(gen)
    gen.add_argument("--beta", type=float, default=0.3, help="reward bump of the hard family")
    gen.add_argument("--out", required=True, help="output instance JSON path")

    lam = sub.add_parser("lambda", help="compute the exploration efficacy of an instance")
    lam.add_argument("--instance", required=True, help="instance JSON path")
    lam.add_argument("--trace", help="optional CSV path for the solver trace")

    run = sub.add_parser("run", help="benchmark one explorer on an instance")
    run.add_argument("--instance", required=True, help="instance JSON path")
    run.add_argument("--algo", choices=bench.ALGORITHMS, required=True)
    _add_run_params(run)

    swp = sub.add_parser("sweep", help="benchmark explorers along a parameter grid")
    swp.add_argument("--axis", choices=bench.SWEEP_AXES, required=True)
    swp.add_argument("--grid", required=True, help="comma-separated grid values")
    swp.add_argument(
        "--algo",
        default="convexplore,unif",
        help="comma-separated explorer names",
    )
    _add_instance_params(swp)
    swp.add_argument("--budget", type=int, default=20_000, help="rounds per run (non-budget axes)")
    swp.add_argument("--runs", type=int, default=100)
    swp.add_argument("--jobs", type=int, default=1)
    swp.add_argument("--out", required=True, help="output CSV path")

    return parser


def _cmd_gen(args: argparse.Namespace) -> int:
    if args.kind == "paper":
        inst = bench.gen_paper_instance(args.n, args.k, args.eps, args.m, args.seed)
    elif args.kind == "lowerbound":
        inst = bench.gen_lower_bound_instance(args.k, beta=args.beta, m_recipe=args.m)
    else:
        inst = bench.gen_random_instance(args.n, args.k, args.seed)
    save_instance(inst, args.out)
    print(f"wrote {args.kind} instance (n={inst.n}, k={inst.k}) to {args.out}")
    return 0


def _cmd_lambda(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    result = lambda_of(true_transition_matrix(inst), bench.context_thresholds(inst))
    print(f"lambda,{result.lam!r}")
    print(f"converged,{str(result.converged).lower()}")
    print("action_index,frequency")
    for a, weight in enumerate(result.minimizer):
        print(f"{a},{float(weight)!r}")
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write("iteration,objective\n")
            for it, obj in result.objective_trace:
                fh.write(f"{it},{obj!r}\n")
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    report = bench.run_experiment(
        inst, args.algo, args.budget, args.runs, args.seed, args.jobs
    )
    bench.write_reports_csv(args.out, [report])
    print(",".join(bench.CSV_COLUMNS))
    print(",".join(report.csv_row()))
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    spec = bench.SweepSpec(
        axis=args.axis,
        grid=tuple(int(v) for v in args.grid.split(",")),
        n=args.n,
        k=args.k,
        eps=args.eps,
        m=args.m,
        seed=args.seed,
        runs=args.runs,
        T=args.budget,
        jobs=args.jobs,
    )
    algos = tuple(a.strip() for a in args.algo.split(",") if a.strip())
    reports = bench.sweep(spec, algos)
    bench.write_reports_csv(args.out, reports)
    print(",".join(bench.CSV_COLUMNS))
    for report in reports:
        print(",".join(report.csv_row()))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "gen": _cmd_gen,
        "lambda": _cmd_lambda,
        "run": _cmd_run,
        "sweep": _cmd_sweep,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
