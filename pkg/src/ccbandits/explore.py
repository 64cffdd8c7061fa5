"""Budget-split convex exploration and its estimation subroutines.

The explorer spends its round budget in three equal phases: estimate the
start-state transition rows (performing only do() plus the rare start
actions explicitly, reading every other row off the observed start
realizations), estimate each context's observational threshold under a
max-min visiting frequency, and estimate the reward table under a
design-optimal visiting frequency (again reading frequently-observed
context actions off do() rounds and round-robining the rare ones).  The
returned policy is greedy with respect to the estimated tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .env import CausalInstance, Simulator
from .interventions import Intervention
from .optim import convex_minmax, maximin_lp
from .thresholds import DEFAULT_THRESHOLD, causal_threshold, observation_probabilities

#: Reward assumed for (action, context) pairs that were never observed.
DEFAULT_REWARD = 0.0

#: Solver budget used inside the explorer; estimation noise at realistic
#: round budgets dwarfs a 1e-4-accurate design frequency.
_DESIGN_SOLVE = dict(max_iter=4000, window=200)


@dataclass(frozen=True)
class Policy:
    """Chosen action at the start state and at each intermediate context."""

    start: Intervention
    per_context: tuple[Intervention, ...]

    def action_indices(self) -> tuple[int, ...]:
        return (self.start.index,) + tuple(iv.index for iv in self.per_context)


@dataclass(frozen=True)
class EstimationState:
    """Everything the explorer learned, plus its budget accounting."""

    p_hat: np.ndarray = field(repr=False)
    p_row_known: np.ndarray = field(repr=False)
    m0_hat: int = DEFAULT_THRESHOLD
    rare0: frozenset[Intervention] = frozenset()
    m_hat: np.ndarray = field(default=None, repr=False)
    context_visited: np.ndarray = field(default=None, repr=False)
    r_hat: np.ndarray = field(default=None, repr=False)
    r_known: np.ndarray = field(default=None, repr=False)
    start_pulls: np.ndarray = field(default=None, repr=False)
    context_visits: np.ndarray = field(default=None, repr=False)
    context_pulls: np.ndarray = field(default=None, repr=False)
    budget_ledger: dict[str, int] = field(default_factory=dict)

    @property
    def rounds_used(self) -> int:
        return sum(self.budget_ledger.values())


def _as_simulator(env: CausalInstance | Simulator) -> Simulator:
    return env if isinstance(env, Simulator) else Simulator(env)


def _allocate(freq: np.ndarray, budget: int) -> np.ndarray:
    """Integer round counts: floor(f_a * budget), remainder given to do()."""
    counts = np.floor(freq * budget).astype(np.int64)
    counts[0] += budget - int(counts.sum())
    return counts


def _mix_half_uniform(f_tilde: np.ndarray) -> np.ndarray:
    n = f_tilde.size
    return 0.5 * (f_tilde + 1.0 / n)


def _mix_third_uniform(f_star: np.ndarray, f_tilde: np.ndarray) -> np.ndarray:
    n = f_star.size
    return (f_star + f_tilde + 1.0 / n) / 3.0


@dataclass(frozen=True)
class TransitionEstimate:
    p_hat: np.ndarray
    m0_hat: int
    rare0: frozenset[Intervention]
    q0_hat: np.ndarray
    row_known: np.ndarray
    start_pulls: np.ndarray
    rounds: int


def estimate_transitions(
    env: CausalInstance | Simulator, budget: int, rng: np.random.Generator
) -> TransitionEstimate:
    """Estimate the start-state transition rows within ``budget`` rounds.

    The first half of the budget performs do(); those rounds give the
    variable frequencies (hence the start threshold and its rare action
    set), the do() row, and a conditional row estimate for every non-rare
    set action.  The second half is split evenly across the rare actions,
    whose rows are estimated from their own transitions only; leftover
    rounds (and the whole second half, if no action is rare) perform
    additional do() rounds that refine the observational estimates.
    """
    sim = _as_simulator(env)
    N, n, k = sim.num_interventions, sim.n, sim.k
    if budget < 2 * N:
        raise ValueError(f"transition budget {budget} below the floor {2 * N}")
    first_half = budget // 2
    second_half = budget - first_half

    bits, contexts = sim.sample_start(0, first_half, rng)
    q0_hat = bits.mean(axis=0)
    threshold = causal_threshold(q0_hat)
    rare = threshold.rare_indices()

    per_rare = second_half // len(rare) if rare else 0
    extra_do = second_half - per_rare * len(rare)

    p_hat = np.zeros((N, k))
    row_known = np.zeros(N, dtype=bool)
    start_pulls = np.zeros(N, dtype=np.int64)
    for a in rare:
        if per_rare == 0:
            continue
        _, ctx_a = sim.sample_start(a, per_rare, rng)
        p_hat[a] = np.bincount(ctx_a, minlength=k) / per_rare
        row_known[a] = True
        start_pulls[a] = per_rare
    if extra_do:
        bits_extra, ctx_extra = sim.sample_start(0, extra_do, rng)
        bits = np.concatenate([bits, bits_extra])
        contexts = np.concatenate([contexts, ctx_extra])

    do_rounds = bits.shape[0]
    start_pulls[0] = do_rounds
    p_hat[0] = np.bincount(contexts, minlength=k) / do_rounds
    row_known[0] = True

    onehot = np.zeros((do_rounds, k))
    onehot[np.arange(do_rounds), contexts] = 1.0
    counts_if_one = bits.T.astype(float) @ onehot          # (n, k)
    totals_if_one = bits.sum(axis=0).astype(float)         # (n,)
    counts_any = onehot.sum(axis=0)
    rare_set = set(rare)
    for j in range(n):
        for x in (0, 1):
            a = 1 + 2 * j + x
            if a in rare_set:
                continue
            obs = totals_if_one[j] if x == 1 else do_rounds - totals_if_one[j]
            if obs == 0:
                continue
            row_counts = counts_if_one[j] if x == 1 else counts_any - counts_if_one[j]
            p_hat[a] = row_counts / obs
            row_known[a] = True

    return TransitionEstimate(
        p_hat=p_hat,
        m0_hat=threshold.m,
        rare0=threshold.rare_set,
        q0_hat=q0_hat,
        row_known=row_known,
        start_pulls=start_pulls,
        rounds=budget,
    )


def _start_blocks(
    sim: Simulator, counts: np.ndarray, rng: np.random.Generator
) -> list[np.ndarray]:
    """Perform each start action its allotted number of times.

    Returns one array of reached-context indices per performed block; only
    the per-context visit totals matter downstream.
    """
    arrivals = []
    for a in range(counts.size):
        if counts[a] == 0:
            continue
        _, ctx = sim.sample_start(a, int(counts[a]), rng)
        arrivals.append(ctx)
    return arrivals


@dataclass(frozen=True)
class CausalParamEstimate:
    m_hat: np.ndarray
    context_visited: np.ndarray
    context_visits: np.ndarray
    rounds: int


def estimate_causal_params(
    env: CausalInstance | Simulator,
    f_tilde: np.ndarray,
    budget: int,
    rng: np.random.Generator,
) -> CausalParamEstimate:
    """Estimate each context's observational threshold within ``budget``.

    Start actions follow the max-min frequency mixed half-and-half with
    uniform; every reached context is probed with do() and its threshold
    computed from the observed variable frequencies.  Contexts never
    reached keep the default threshold and are flagged.
    """
    sim = _as_simulator(env)
    N, k = sim.num_interventions, sim.k
    if budget < N:
        raise ValueError(f"causal-parameter budget {budget} below the floor {N}")
    counts = _allocate(_mix_half_uniform(np.asarray(f_tilde, dtype=float)), budget)
    arrivals = _start_blocks(sim, counts, rng)
    visits = np.zeros(k, dtype=np.int64)
    for ctx in arrivals:
        visits += np.bincount(ctx, minlength=k)

    m_hat = np.full(k, DEFAULT_THRESHOLD, dtype=np.int64)
    visited = visits > 0
    for i in range(k):
        if not visited[i]:
            continue
        ctx_bits, _ = sim.sample_context(i, 0, int(visits[i]), rng)
        m_hat[i] = causal_threshold(ctx_bits.mean(axis=0)).m
    return CausalParamEstimate(
        m_hat=m_hat, context_visited=visited, context_visits=visits, rounds=budget
    )


@dataclass(frozen=True)
class RewardEstimate:
    r_hat: np.ndarray
    r_known: np.ndarray
    context_pulls: np.ndarray
    rounds: int


def estimate_rewards(
    env: CausalInstance | Simulator,
    f_star: np.ndarray,
    f_tilde: np.ndarray,
    m_hat: np.ndarray,
    budget: int,
    rng: np.random.Generator,
) -> RewardEstimate:
    """Estimate the reward table within ``budget`` rounds.

    Start actions follow the design frequency mixed with the max-min and
    uniform frequencies.  In the first half every reached context is
    probed with do(): the do() column entry and every context action
    observed with probability at least 1/m_hat[i] are estimated from those
    passive observations.  In the second half the rare context actions are
    performed explicitly, as evenly as the visit counts allow.  Contexts
    whose rare set cannot be determined (no passive observations) spend
    their second-half visits on additional do() rounds instead.
    """
    sim = _as_simulator(env)
    N, n, k = sim.num_interventions, sim.n, sim.k
    if budget < 2 * N:
        raise ValueError(f"reward budget {budget} below the floor {2 * N}")
    m_hat = np.asarray(m_hat, dtype=float)
    freq = _mix_third_uniform(np.asarray(f_star, dtype=float), np.asarray(f_tilde, dtype=float))
    first_half = budget // 2
    second_half = budget - first_half

    visits1 = np.zeros(k, dtype=np.int64)
    for ctx in _start_blocks(sim, _allocate(freq, first_half), rng):
        visits1 += np.bincount(ctx, minlength=k)
    obs_bits: list[np.ndarray | None] = [None] * k
    obs_rewards: list[np.ndarray | None] = [None] * k
    for i in range(k):
        if visits1[i]:
            obs_bits[i], obs_rewards[i] = sim.sample_context(i, 0, int(visits1[i]), rng)

    rare_sets: list[list[int]] = [[] for _ in range(k)]
    for i in range(k):
        if obs_bits[i] is None:
            continue
        probs = observation_probabilities(obs_bits[i].mean(axis=0))
        rare_sets[i] = [a for a in range(1, N) if probs[a - 1] < 1.0 / m_hat[i]]

    visits2 = np.zeros(k, dtype=np.int64)
    for ctx in _start_blocks(sim, _allocate(freq, second_half), rng):
        visits2 += np.bincount(ctx, minlength=k)

    r_hat = np.full((N, k), DEFAULT_REWARD)
    r_known = np.zeros((N, k), dtype=bool)
    context_pulls = np.zeros((N, k), dtype=np.int64)
    for i in range(k):
        rare = rare_sets[i]
        v2 = int(visits2[i])
        if rare and v2:
            base, leftover = divmod(v2, len(rare))
            for slot, a in enumerate(rare):
                pulls = base + (1 if slot < leftover else 0)
                if pulls == 0:
                    continue
                _, rewards = sim.sample_context(i, a, pulls, rng)
                r_hat[a, i] = rewards.mean()
                r_known[a, i] = True
                context_pulls[a, i] = pulls
        elif v2:
            extra_bits, extra_rewards = sim.sample_context(i, 0, v2, rng)
            obs_bits[i] = extra_bits if obs_bits[i] is None else np.concatenate([obs_bits[i], extra_bits])
            obs_rewards[i] = (
                extra_rewards if obs_rewards[i] is None else np.concatenate([obs_rewards[i], extra_rewards])
            )
            if not rare:
                probs = observation_probabilities(obs_bits[i].mean(axis=0))
                rare_sets[i] = [a for a in range(1, N) if probs[a - 1] < 1.0 / m_hat[i]]

    for i in range(k):
        bits, rewards = obs_bits[i], obs_rewards[i]
        if bits is None:
            continue
        context_pulls[0, i] += rewards.size
        r_hat[0, i] = rewards.mean()
        r_known[0, i] = True
        rare = set(rare_sets[i])
        for j in range(n):
            col = bits[:, j]
            for x in (0, 1):
                a = 1 + 2 * j + x
                if a in rare:
                    continue
                mask = col == x
                hits = int(mask.sum())
                if hits == 0:
                    continue
                r_hat[a, i] = rewards[mask].mean()
                r_known[a, i] = True

    return RewardEstimate(
        r_hat=r_hat, r_known=r_known, context_pulls=context_pulls, rounds=budget
    )


def greedy_policy(p_hat: np.ndarray, r_hat: np.ndarray) -> Policy:
    """Greedy policy for estimated tables; ties go to the lowest action index."""
    p_hat = np.asarray(p_hat, dtype=float)
    r_hat = np.asarray(r_hat, dtype=float)
    if p_hat.shape != r_hat.shape:
        raise ValueError(f"shape mismatch: {p_hat.shape} vs {r_hat.shape}")
    best_actions = r_hat.argmax(axis=0)
    best_rewards = r_hat.max(axis=0)
    start = int((p_hat @ best_rewards).argmax())
    return Policy(
        start=Intervention.from_index(start),
        per_context=tuple(Intervention.from_index(int(a)) for a in best_actions),
    )


def conv_explore(
    env: CausalInstance | Simulator, total_budget: int, rng: np.random.Generator
) -> tuple[Policy, EstimationState]:
    """Run the three-phase convex exploration algorithm for ``total_budget`` rounds.

    Each phase receives a third of the budget (the remainder of the
    integer split goes to the reward phase); the total number of
    environment rounds consumed is exactly ``total_budget``.
    """
    sim = _as_simulator(env)
    N = sim.num_interventions
    if total_budget < 6 * N:
        raise ValueError(f"budget {total_budget} below the floor {6 * N}")
    phase1 = total_budget // 3
    phase2 = total_budget // 3
    phase3 = total_budget - phase1 - phase2

    transitions = estimate_transitions(sim, phase1, rng)
    f_tilde = maximin_lp(transitions.p_hat)
    params = estimate_causal_params(sim, f_tilde, phase2, rng)
    f_star, _, _ = convex_minmax(transitions.p_hat, params.m_hat, **_DESIGN_SOLVE)
    rewards = estimate_rewards(sim, f_star, f_tilde, params.m_hat, phase3, rng)

    policy = greedy_policy(transitions.p_hat, rewards.r_hat)
    state = EstimationState(
        p_hat=transitions.p_hat,
        p_row_known=transitions.row_known,
        m0_hat=transitions.m0_hat,
        rare0=transitions.rare0,
        m_hat=params.m_hat,
        context_visited=params.context_visited,
        r_hat=rewards.r_hat,
        r_known=rewards.r_known,
        start_pulls=transitions.start_pulls,
        context_visits=params.context_visits,
        context_pulls=rewards.context_pulls,
        budget_ledger={
            "transitions": transitions.rounds,
            "causal_params": params.rounds,
            "rewards": rewards.rounds,
        },
    )
    return policy, state
