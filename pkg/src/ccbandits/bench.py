"""Instance generators, exact regret evaluation, and the experiment harness.

Regret is always evaluated in closed form from the ground-truth matrices,
never by rollout, so experiment noise comes from the explorers alone.
Per-run generators are derived from (master_seed, run_index) through
numpy's SeedSequence, which makes every experiment reproducible and
independent of how runs are distributed across worker processes.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .baselines import BaselineKind, baseline_explore
from .env import (
    CausalInstance,
    ContextModel,
    FirstOne,
    LinearMix,
    Lookup,
    Simulator,
    true_reward_matrix,
    true_transition_matrix,
)
from .explore import Policy, conv_explore
from .interventions import Intervention
from .optim import lambda_of
from .thresholds import causal_threshold

REGRET_ZERO_TOL = 1e-12

SWEEP_AXES = ("budget", "lambda", "contexts")

#: CLI names of all available explorers.
ALGORITHMS = ("convexplore",) + tuple(kind.value for kind in BaselineKind)

CSV_COLUMNS = (
    "algo", "T", "k", "n", "m", "lambda", "runs",
    "mean_regret", "stderr", "prob_best", "wall_seconds",
)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def _threshold_recipe_q(n: int, m: int) -> np.ndarray:
    """q vector whose observational threshold is exactly m: m zeros, rest 1/2."""
    q = np.full(n, 0.5)
    q[:m] = 0.0
    return q


def _constant_reward(value: float) -> Lookup:
    return Lookup(subset=(), table=np.array([value]))


def _bumped_reward(var: int, base: float, bumped: float) -> Lookup:
    return Lookup(subset=(var,), table=np.array([base, bumped]))


def gen_paper_instance(
    n: int, k: int, eps: float, m_intermediate: int, seed: int = 0
) -> CausalInstance:
    """Benchmark instance: uniform do() transitions, one bumped reward arm.

    Each intermediate context uses the threshold recipe with
    ``m_intermediate`` zeros, so its exact observational threshold equals
    ``m_intermediate``.  Rewards are 1/2 everywhere except action
    do(X0=1) at context 0, whose interventional mean is 1/2 + eps; the
    bump sits on a zero-probability variable value, so the do() reward
    stays exactly 1/2.  Transitions are the closest consistent mixture
    design: do() is exactly uniform (when k divides n), while do(Xj=1)
    boosts context j mod k above 1/k and leaves the rest slightly below.

    The construction is deterministic; ``seed`` is accepted for interface
    uniformity and ignored.
    """
    del seed
    if not 2 <= m_intermediate <= n:
        raise ValueError(f"need 2 <= m <= n, got m={m_intermediate}, n={n}")
    if not 0.0 < eps <= 0.5:
        raise ValueError(f"need 0 < eps <= 0.5, got {eps}")
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    tables = np.empty((n, 2, k))
    tables[:, 0, :] = 1.0 / k
    tables[:, 1, :] = 0.0
    for j in range(n):
        tables[j, 1, j % k] = 1.0
    transition = LinearMix(weights=np.full(n, 1.0 / n), tables=tables)
    q_ctx = _threshold_recipe_q(n, m_intermediate)
    contexts = [
        ContextModel(
            q=q_ctx,
            reward_map=_bumped_reward(0, 0.5, 0.5 + eps) if i == 0 else _constant_reward(0.5),
        )
        for i in range(k)
    ]
    return CausalInstance(
        k=k, n=n, q0=np.full(n, 0.5), transition_map=transition, contexts=tuple(contexts)
    )


def gen_lower_bound_instance(
    k: int,
    target: tuple[int, Intervention] = (0, Intervention(var=0, value=1)),
    beta: float = 0.0,
    m_recipe: int | Sequence[int] = 2,
) -> CausalInstance:
    """Hard-instance family with deterministic transitions.

    Uses n = k - 1 variables, all zero at the start state, with a
    first-one transition kernel: do(Xj=1) reaches context j with
    probability one and every other start action reaches context k - 1.
    All rewards are 1/2 except the target (context, action) pair at
    1/2 + beta; beta = 0 gives the fully symmetric member on which every
    policy has zero regret.  Any policy missing the target pair is exactly
    beta suboptimal.
    """
    if k < 3:
        raise ValueError(f"need k >= 3 so every context threshold can reach 2, got k={k}")
    n = k - 1
    if not 0.0 <= beta <= 1.0 / 3.0:
        raise ValueError(f"need 0 <= beta <= 1/3, got {beta}")
    ms = np.full(k, m_recipe, dtype=np.int64) if np.isscalar(m_recipe) else np.asarray(m_recipe, dtype=np.int64)
    if ms.shape != (k,):
        raise ValueError(f"m recipe must be a scalar or length-{k} sequence")
    if np.any(ms < 2) or np.any(ms > n):
        raise ValueError(f"per-context thresholds must lie in [2, {n}]")
    s, arm = target
    if not 0 <= s < k:
        raise ValueError(f"target context {s} out of range")
    if arm.is_do_nothing or arm.value != 1 or not 0 <= arm.var < n:
        raise ValueError(f"target action must set a variable to 1, got {arm!r}")
    if arm.var >= ms[s]:
        raise ValueError(
            f"target action {arm!r} needs q=0 at context {s}, but variable "
            f"{arm.var} has q=0.5 there (only the first {ms[s]} variables are zero)"
        )

    outcomes = np.zeros((n, k))
    outcomes[np.arange(n), np.arange(n)] = 1.0
    default = np.zeros(k)
    default[k - 1] = 1.0
    contexts = [
        ContextModel(
            q=_threshold_recipe_q(n, int(ms[i])),
            reward_map=_bumped_reward(arm.var, 0.5, 0.5 + beta) if i == s else _constant_reward(0.5),
        )
        for i in range(k)
    ]
    return CausalInstance(
        k=k,
        n=n,
        q0=np.zeros(n),
        transition_map=FirstOne(outcomes=outcomes, default=default),
        contexts=tuple(contexts),
    )


def gen_random_instance(
    n: int,
    k: int,
    seed: int,
    q_range: tuple[float, float] = (0.1, 0.9),
) -> CausalInstance:
    """Random valid instance mixing all three kernel families."""
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    rng = np.random.default_rng(seed)
    lo, hi = q_range

    def rand_q() -> np.ndarray:
        return rng.uniform(lo, hi, size=n)

    def rand_map(scalar: bool):
        variant = rng.integers(3)
        if variant == 0:
            if scalar:
                tables = rng.uniform(0.0, 1.0, size=(n, 2))
            else:
                tables = rng.dirichlet(np.ones(k), size=(n, 2))
            return LinearMix(weights=rng.dirichlet(np.ones(n)), tables=tables)
        if variant == 1:
            if scalar:
                return FirstOne(
                    outcomes=rng.uniform(0.0, 1.0, size=n),
                    default=rng.uniform(0.0, 1.0),
                )
            return FirstOne(
                outcomes=rng.dirichlet(np.ones(k), size=n),
                default=rng.dirichlet(np.ones(k)),
            )
        size = int(rng.integers(1, min(n, 3) + 1))
        subset = tuple(sorted(rng.choice(n, size=size, replace=False).tolist()))
        if scalar:
            return Lookup(subset=subset, table=rng.uniform(0.0, 1.0, size=2**size))
        return Lookup(subset=subset, table=rng.dirichlet(np.ones(k), size=2**size))

    contexts = tuple(
        ContextModel(q=rand_q(), reward_map=rand_map(scalar=True)) for _ in range(k)
    )
    return CausalInstance(
        k=k, n=n, q0=rand_q(), transition_map=rand_map(scalar=False), contexts=contexts
    )


def default_beta(m_values: Sequence[float], total_budget: int) -> float:
    """Reward bump used by the hard family: min(1/3, sqrt(sum(m) / (18 T)))."""
    if total_budget < 1:
        raise ValueError("budget must be at least 1")
    ms = np.asarray(m_values, dtype=float)
    if np.any(ms < 2):
        raise ValueError("per-context thresholds must be >= 2")
    return min(1.0 / 3.0, float(np.sqrt(ms.sum() / (18.0 * total_budget))))


# ---------------------------------------------------------------------------
# Exact evaluation
# ---------------------------------------------------------------------------


def context_thresholds(inst: CausalInstance) -> np.ndarray:
    """Exact observational threshold of each intermediate context."""
    return np.array([causal_threshold(ctx.q).m for ctx in inst.contexts], dtype=np.int64)


def instance_lambda(inst: CausalInstance, **solver_kwargs) -> float:
    """Exploration efficacy of the ground-truth instance."""
    P = true_transition_matrix(inst)
    return lambda_of(P, context_thresholds(inst), **solver_kwargs).lam


def simple_regret(inst: CausalInstance, policy: Policy) -> float:
    """Exact value gap between the best policy and ``policy``."""
    N = inst.num_interventions
    indices = policy.action_indices()
    if len(indices) != inst.k + 1 or any(not 0 <= a < N for a in indices):
        raise ValueError("policy does not match the instance's action space")
    P = true_transition_matrix(inst)
    R = true_reward_matrix(inst)
    mu_star = float((P @ R.max(axis=0)).max())
    chosen = R[list(indices[1:]), np.arange(inst.k)]
    mu = float(P[indices[0]] @ chosen)
    return mu_star - mu


# ---------------------------------------------------------------------------
# Monte-Carlo harness
# ---------------------------------------------------------------------------


def run_seed(master_seed: int, run_index: int) -> np.random.SeedSequence:
    """Per-run seed: SeedSequence([master_seed, run_index])."""
    return np.random.SeedSequence([master_seed, run_index])


def run_algorithm(
    algo: str, env: CausalInstance | Simulator, total_budget: int, rng: np.random.Generator
) -> Policy:
    """Dispatch an explorer by CLI name."""
    if algo == "convexplore":
        return conv_explore(env, total_budget, rng)[0]
    return baseline_explore(BaselineKind.from_name(algo), env, total_budget, rng)


_WORKER: dict = {}


def _init_worker(inst: CausalInstance, algo: str, total_budget: int, master_seed: int) -> None:
    _WORKER["sim"] = Simulator(inst)
    _WORKER["inst"] = inst
    _WORKER["algo"] = algo
    _WORKER["budget"] = total_budget
    _WORKER["master_seed"] = master_seed


def _run_indexed(run_index: int) -> float:
    rng = np.random.default_rng(run_seed(_WORKER["master_seed"], run_index))
    policy = run_algorithm(_WORKER["algo"], _WORKER["sim"], _WORKER["budget"], rng)
    return simple_regret(_WORKER["inst"], policy)


def run_many(
    inst: CausalInstance,
    algo: str,
    total_budget: int,
    runs: int,
    master_seed: int,
    jobs: int = 1,
) -> np.ndarray:
    """Per-run exact regrets of ``runs`` independent explorations.

    Results are aggregated in run-index order and are bit-identical for
    any ``jobs`` value.
    """
    if runs < 1:
        raise ValueError("need at least one run")
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}; expected one of {ALGORITHMS}")
    if jobs <= 1:
        _init_worker(inst, algo, total_budget, master_seed)
        try:
            return np.array([_run_indexed(i) for i in range(runs)])
        finally:
            _WORKER.clear()
    with ProcessPoolExecutor(
        max_workers=jobs,
        initializer=_init_worker,
        initargs=(inst, algo, total_budget, master_seed),
    ) as pool:
        chunk = max(1, runs // (jobs * 4))
        return np.array(list(pool.map(_run_indexed, range(runs), chunksize=chunk)))


@dataclass(frozen=True)
class RunReport:
    """Aggregated outcome of one (instance, algorithm, budget) experiment."""

    algo: str
    T: int
    k: int
    n: int
    m: int
    lam: float
    runs: int
    mean_regret: float
    stderr: float
    prob_best: float
    wall_seconds: float

    def csv_row(self) -> list[str]:
        return [
            self.algo, str(self.T), str(self.k), str(self.n), str(self.m),
            repr(self.lam), str(self.runs), repr(self.mean_regret),
            repr(self.stderr), repr(self.prob_best), repr(self.wall_seconds),
        ]


def run_experiment(
    inst: CausalInstance,
    algo: str,
    total_budget: int,
    runs: int,
    master_seed: int,
    jobs: int = 1,
    lam: float | None = None,
) -> RunReport:
    """Run an experiment and aggregate exact regrets into a report.

    ``lam`` short-circuits the instance's efficacy computation when the
    caller already knows it (sweeps reuse it across algorithms).
    """
    if lam is None:
        lam = instance_lambda(inst)
    start = time.perf_counter()
    regrets = run_many(inst, algo, total_budget, runs, master_seed, jobs)
    wall = time.perf_counter() - start
    stderr = float(regrets.std(ddof=1) / np.sqrt(runs)) if runs > 1 else 0.0
    return RunReport(
        algo=algo,
        T=total_budget,
        k=inst.k,
        n=inst.n,
        m=int(context_thresholds(inst).max()),
        lam=float(lam),
        runs=runs,
        mean_regret=float(regrets.mean()),
        stderr=stderr,
        prob_best=float((regrets <= REGRET_ZERO_TOL).mean()),
        wall_seconds=wall,
    )


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepSpec:
    """One-dimensional experiment sweep.

    ``axis`` is "budget" (grid of T values on a fixed base instance),
    "lambda" (grid of per-context threshold recipes; the instance's true
    efficacy is recomputed per point), or "contexts" (grid of k values;
    the base instance is regenerated with n = k, matching the benchmark
    regime).  Non-budget axes run at the fixed budget ``T``.
    """

    axis: str
    grid: tuple[int, ...]
    n: int = 10
    k: int = 10
    eps: float = 0.3
    m: int = 2
    seed: int = 0
    runs: int = 100
    T: int = 20_000
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.axis not in SWEEP_AXES:
            raise ValueError(f"axis must be one of {SWEEP_AXES}, got {self.axis!r}")
        grid = tuple(int(v) for v in self.grid)
        if not grid:
            raise ValueError("sweep grid must be non-empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("sweep grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)


def sweep(spec: SweepSpec, algos: Sequence[str]) -> list[RunReport]:
    """One report per (grid point, algorithm), grid-major then algo order."""
    if not algos:
        raise ValueError("need at least one algorithm to sweep")
    for algo in algos:
        if algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {algo!r}; expected one of {ALGORITHMS}")
    reports = []
    for value in spec.grid:
        if spec.axis == "budget":
            inst, budget = gen_paper_instance(spec.n, spec.k, spec.eps, spec.m), value
        elif spec.axis == "lambda":
            inst, budget = gen_paper_instance(spec.n, spec.k, spec.eps, value), spec.T
        else:
            inst, budget = gen_paper_instance(value, value, spec.eps, spec.m), spec.T
        lam = instance_lambda(inst)
        for algo in algos:
            reports.append(
                run_experiment(inst, algo, budget, spec.runs, spec.seed, spec.jobs, lam=lam)
            )
    return reports


def write_reports_csv(path, reports: Sequence[RunReport]) -> None:
    """Write reports with the canonical column order; floats use repr."""
    lines = [",".join(CSV_COLUMNS)]
    lines += [",".join(r.csv_row()) for r in reports]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
