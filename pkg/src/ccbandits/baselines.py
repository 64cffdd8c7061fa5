"""Reference explorers the convex explorer is benchmarked against.

None of these exploit the causal structure: they treat the start state and
each context as plain multi-armed bandits and never condition on variable
realizations.  They therefore interact with the environment through its
exact marginal law (context given start action, reward given context
action), which the simulator samples directly.  UCB arms score
mean + sqrt(2 ln t / pulls) with unpulled arms tried first; Thompson arms
sample Beta(1 + successes, 1 + failures) posteriors.  At the start state
the credited "reward" of an action is the terminal reward of the round it
initiated.  Every variant returns a policy that is greedy on its empirical
means (UnifExplore composes its empirical transition and reward tables
instead, like the convex explorer).
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from .env import CausalInstance, Simulator
from .explore import Policy, greedy_policy, _as_simulator
from .interventions import Intervention


class BaselineKind(Enum):
    UNIF_EXPLORE = "unif"
    UCB_BOTH = "ucb"
    TS_BOTH = "ts"
    ROUND_ROBIN_START_UCB = "rr-ucb"
    ROUND_ROBIN_START_TS = "rr-ts"

    @classmethod
    def from_name(cls, name: str) -> "BaselineKind":
        for kind in cls:
            if kind.value == name:
                return kind
        raise ValueError(f"unknown baseline {name!r}; expected one of "
                         f"{[k.value for k in cls]}")


def _round_robin_counts(total: int, arms: int) -> np.ndarray:
    """Pull counts after cycling arms in canonical order for ``total`` rounds."""
    base, rem = divmod(total, arms)
    return base + (np.arange(arms) < rem).astype(np.int64)


def unif_explore(
    env: CausalInstance | Simulator, total_budget: int, rng: np.random.Generator
) -> Policy:
    """Round-robin exploration at the start state and at every context."""
    if total_budget < 1:
        raise ValueError("budget must be at least 1 round")
    sim = _as_simulator(env)
    N, k = sim.num_interventions, sim.k

    start_counts = _round_robin_counts(total_budget, N)
    p_hat = np.zeros((N, k))
    visits = np.zeros(k, dtype=np.int64)
    for a in range(N):
        if start_counts[a] == 0:
            continue
        ctx = sim.sample_start_marginal(a, int(start_counts[a]), rng)
        arrivals = np.bincount(ctx, minlength=k)
        p_hat[a] = arrivals / start_counts[a]
        visits += arrivals

    r_hat = np.zeros((N, k))
    for i in range(k):
        if visits[i] == 0:
            continue
        for a, pulls in enumerate(_round_robin_counts(int(visits[i]), N)):
            if pulls == 0:
                continue
            rewards = sim.sample_context_marginal(i, a, int(pulls), rng)
            r_hat[a, i] = rewards.mean()
    return greedy_policy(p_hat, r_hat)


class _UcbBandit:
    __slots__ = ("counts", "sums", "time")

    def __init__(self, arms: int):
        self.counts = np.zeros(arms, dtype=np.int64)
        self.sums = np.zeros(arms)
        self.time = 0

    def choose(self, rng: np.random.Generator) -> int:
        self.time += 1
        if self.time <= self.counts.size:
            return self.time - 1  # one sweep in canonical order
        bonus = np.sqrt(2.0 * math.log(self.time) / self.counts)
        return int(np.argmax(self.sums / self.counts + bonus))

    def update(self, arm: int, reward: int) -> None:
        self.counts[arm] += 1
        self.sums[arm] += reward

    def best_mean(self) -> int:
        means = self.sums / np.maximum(self.counts, 1)
        return int(np.argmax(means))


class _TsBandit(_UcbBandit):
    __slots__ = ("alpha", "beta")

    def __init__(self, arms: int):
        super().__init__(arms)
        self.alpha = np.ones(arms)
        self.beta = np.ones(arms)

    def choose(self, rng: np.random.Generator) -> int:
        self.time += 1
        return int(np.argmax(rng.beta(self.alpha, self.beta)))

    def update(self, arm: int, reward: int) -> None:
        super().update(arm, reward)
        self.alpha[arm] += reward
        self.beta[arm] += 1 - reward


def baseline_explore(
    kind: BaselineKind,
    env: CausalInstance | Simulator,
    total_budget: int,
    rng: np.random.Generator,
) -> Policy:
    """Run one reference explorer for exactly ``total_budget`` rounds."""
    if total_budget < 1:
        raise ValueError("budget must be at least 1 round")
    if kind is BaselineKind.UNIF_EXPLORE:
        return unif_explore(env, total_budget, rng)

    sim = _as_simulator(env)
    N, k = sim.num_interventions, sim.k
    thompson = kind in (BaselineKind.TS_BOTH, BaselineKind.ROUND_ROBIN_START_TS)
    bandit_cls = _TsBandit if thompson else _UcbBandit
    contexts = [bandit_cls(N) for _ in range(k)]

    if kind in (BaselineKind.UCB_BOTH, BaselineKind.TS_BOTH):
        start = bandit_cls(N)
        for _ in range(total_budget):
            a0 = start.choose(rng)
            i = sim.play_start_marginal(a0, rng)
            a = contexts[i].choose(rng)
            r = sim.play_context_marginal(i, a, rng)
            contexts[i].update(a, r)
            start.update(a0, r)
        start_sums, start_counts = start.sums, start.counts
    else:
        # Start arms cycle deterministically, so the start rounds can be
        # drawn in per-arm blocks; each context bandit still sees its own
        # visits one at a time, here grouped by originating start arm.
        start_sums = np.zeros(N)
        start_counts = _round_robin_counts(total_budget, N).astype(np.float64)
        sources: list[list[int]] = [[] for _ in range(k)]
        for a0, pulls in enumerate(start_counts.astype(np.int64)):
            if pulls == 0:
                continue
            for i in sim.sample_start_marginal(a0, int(pulls), rng):
                sources[i].append(a0)
        for i in range(k):
            bandit = contexts[i]
            for a0 in sources[i]:
                a = bandit.choose(rng)
                r = sim.play_context_marginal(i, a, rng)
                bandit.update(a, r)
                start_sums[a0] += r

    start_means = start_sums / np.maximum(start_counts, 1)
    return Policy(
        start=Intervention.from_index(int(np.argmax(start_means))),
        per_context=tuple(
            Intervention.from_index(bandit.best_mean()) for bandit in contexts
        ),
    )
