"""Factored two-layer causal bandit environments.

An instance has a start state with n independent Bernoulli variables whose
realization drives a stochastic transition into one of k intermediate
contexts; each context hosts its own n independent Bernoulli variables and
a binary reward.  All transition and reward kernels are *structured maps*
(LinearMix / FirstOne / Lookup) over the local variables.  Because the
variables are independent, pinning a variable by intervention and
conditioning on its observed value induce the same downstream
distribution; that identity is what the estimation routines exploit, and
the validator checks it explicitly.

Conventions: variables and contexts are 0-indexed, intervention rows
follow the canonical order of :mod:`ccbandits.interventions`, and Lookup
tables are indexed little-endian in subset order (bit t of the table index
is the value of the t-th listed subset variable).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence, Union

import numpy as np

from .interventions import Intervention, num_interventions

PROB_TOL = 1e-12
#: Largest Lookup subset size; keeps every table exactly enumerable.
MAX_LOOKUP_VARS = 12


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _is_distribution(vec: np.ndarray) -> bool:
    return bool(np.all(vec >= -PROB_TOL) and abs(float(vec.sum()) - 1.0) <= PROB_TOL)


# ---------------------------------------------------------------------------
# Structured maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearMix:
    """Mixture kernel: pick variable j with probability w_j, emit T[j, X_j].

    ``tables`` has shape (n, 2, k) for context-distribution outcomes or
    (n, 2) for scalar reward outcomes.
    """

    weights: np.ndarray
    tables: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", _frozen_array(self.weights))
        object.__setattr__(self, "tables", _frozen_array(self.tables))
        if self.weights.ndim != 1:
            raise ValueError("weights must be a 1-D vector")
        if self.tables.ndim not in (2, 3) or self.tables.shape[:2] != (self.weights.size, 2):
            raise ValueError("tables must have shape (n, 2) or (n, 2, k)")

    @property
    def scalar(self) -> bool:
        return self.tables.ndim == 2

    def check(self, n: int, k: int | None, name: str) -> list[str]:
        issues = []
        if self.weights.size != n:
            issues.append(f"{name}: weights has length {self.weights.size}, expected {n}")
            return issues
        if not _is_distribution(self.weights):
            issues.append(f"{name}: weights is not a probability vector")
        if k is None:
            if not self.scalar:
                issues.append(f"{name}: expected scalar outcomes")
            elif np.any(self.tables < 0.0) or np.any(self.tables > 1.0):
                issues.append(f"{name}: scalar outcomes must lie in [0, 1]")
        else:
            if self.scalar or self.tables.shape[2] != k:
                issues.append(f"{name}: expected outcome distributions over {k} contexts")
            else:
                for j in range(n):
                    for x in (0, 1):
                        if not _is_distribution(self.tables[j, x]):
                            issues.append(
                                f"{name}: outcome row (variable {j}, value {x}) "
                                f"sums to {float(self.tables[j, x].sum()):.12g}"
                            )
        return issues

    def exact_value(self, q: np.ndarray, forced: tuple[int, int] | None):
        p = np.array(q, dtype=float)
        if forced is not None:
            p[forced[0]] = forced[1]
        per_var = self.tables[:, 0] * (1.0 - p)[..., None] + self.tables[:, 1] * p[..., None] \
            if not self.scalar else self.tables[:, 0] * (1.0 - p) + self.tables[:, 1] * p
        return self.weights @ per_var

    def values_for(self, bits: np.ndarray):
        x = bits.astype(float)
        if self.scalar:
            base = float(self.weights @ self.tables[:, 0])
            return base + x @ (self.weights * (self.tables[:, 1] - self.tables[:, 0]))
        base = self.weights @ self.tables[:, 0]
        delta = self.weights[:, None] * (self.tables[:, 1] - self.tables[:, 0])
        return base[None, :] + x @ delta

    def to_dict(self) -> dict:
        return {"variant": "LinearMix", "weights": self.weights.tolist(), "tables": self.tables.tolist()}


@dataclass(frozen=True)
class FirstOne:
    """Deterministic kernel keyed on the first variable realized as 1.

    Emits ``outcomes[j]`` where j is the lowest index with X_j = 1, and
    ``default`` when the realization is all zeros.
    """

    outcomes: np.ndarray
    default: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "outcomes", _frozen_array(self.outcomes))
        object.__setattr__(self, "default", _frozen_array(self.default))
        if self.outcomes.ndim not in (1, 2):
            raise ValueError("outcomes must have shape (n,) or (n, k)")
        if self.default.ndim != self.outcomes.ndim - 1:
            raise ValueError("default must match the outcome kind")

    @property
    def scalar(self) -> bool:
        return self.outcomes.ndim == 1

    def check(self, n: int, k: int | None, name: str) -> list[str]:
        issues = []
        if self.outcomes.shape[0] != n:
            issues.append(f"{name}: outcomes has {self.outcomes.shape[0]} rows, expected {n}")
            return issues
        if k is None:
            if not self.scalar:
                issues.append(f"{name}: expected scalar outcomes")
            elif (
                np.any(self.outcomes < 0.0) or np.any(self.outcomes > 1.0)
                or not 0.0 <= float(self.default) <= 1.0
            ):
                issues.append(f"{name}: scalar outcomes must lie in [0, 1]")
        else:
            if self.scalar or self.outcomes.shape[1] != k or self.default.shape != (k,):
                issues.append(f"{name}: expected outcome distributions over {k} contexts")
            else:
                for j in range(n):
                    if not _is_distribution(self.outcomes[j]):
                        issues.append(f"{name}: outcome row for variable {j} is not a distribution")
                if not _is_distribution(self.default):
                    issues.append(f"{name}: default outcome is not a distribution")
        return issues

    def exact_value(self, q: np.ndarray, forced: tuple[int, int] | None):
        p = np.array(q, dtype=float)
        if forced is not None:
            p[forced[0]] = forced[1]
        none_before = np.concatenate(([1.0], np.cumprod(1.0 - p)[:-1]))
        pr_first = p * none_before
        pr_none = float(np.prod(1.0 - p))
        if self.scalar:
            return pr_first @ self.outcomes + pr_none * float(self.default)
        return pr_first @ self.outcomes + pr_none * self.default

    def values_for(self, bits: np.ndarray):
        has_one = bits.any(axis=1)
        first = bits.argmax(axis=1)
        picked = self.outcomes[first]
        if self.scalar:
            return np.where(has_one, picked, float(self.default))
        return np.where(has_one[:, None], picked, self.default[None, :])

    def to_dict(self) -> dict:
        default = float(self.default) if self.scalar else self.default.tolist()
        return {"variant": "FirstOne", "outcomes": self.outcomes.tolist(), "default": default}


@dataclass(frozen=True)
class Lookup:
    """Table kernel over a small variable subset.

    ``table`` has one row (or scalar) per assignment of the subset; the
    row index is sum over t of X_{subset[t]} * 2**t.  An empty subset
    encodes a constant kernel.
    """

    subset: tuple[int, ...]
    table: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "subset", tuple(int(j) for j in self.subset))
        object.__setattr__(self, "table", _frozen_array(self.table))
        if self.table.ndim not in (1, 2):
            raise ValueError("table must have shape (2^s,) or (2^s, k)")
        if self.table.shape[0] != 2 ** len(self.subset):
            raise ValueError(
                f"table has {self.table.shape[0]} rows, expected {2 ** len(self.subset)}"
            )

    @property
    def scalar(self) -> bool:
        return self.table.ndim == 1

    def check(self, n: int, k: int | None, name: str) -> list[str]:
        issues = []
        if len(self.subset) > MAX_LOOKUP_VARS:
            issues.append(f"{name}: subset of size {len(self.subset)} exceeds {MAX_LOOKUP_VARS}")
        if len(set(self.subset)) != len(self.subset):
            issues.append(f"{name}: subset has repeated variable indices")
        if any(j < 0 or j >= n for j in self.subset):
            issues.append(f"{name}: subset indices must lie in [0, {n})")
        if issues:
            return issues
        if k is None:
            if not self.scalar:
                issues.append(f"{name}: expected scalar outcomes")
            elif np.any(self.table < 0.0) or np.any(self.table > 1.0):
                issues.append(f"{name}: scalar outcomes must lie in [0, 1]")
        else:
            if self.scalar or self.table.shape[1] != k:
                issues.append(f"{name}: expected outcome distributions over {k} contexts")
            else:
                for idx in range(self.table.shape[0]):
                    if not _is_distribution(self.table[idx]):
                        issues.append(f"{name}: table row {idx} is not a distribution")
        return issues

    def _assignment_weights(self, p: np.ndarray) -> np.ndarray:
        # Bit t of the table index is the value of subset[t].
        s = len(self.subset)
        weights = np.ones(2 ** s)
        for t, j in enumerate(self.subset):
            bit = (np.arange(2 ** s) >> t) & 1
            weights *= np.where(bit == 1, p[j], 1.0 - p[j])
        return weights

    def exact_value(self, q: np.ndarray, forced: tuple[int, int] | None):
        p = np.array(q, dtype=float)
        if forced is not None:
            p[forced[0]] = forced[1]
        weights = self._assignment_weights(p)
        result = weights @ self.table
        return float(result) if self.scalar else result

    def values_for(self, bits: np.ndarray):
        if not self.subset:
            idx = np.zeros(bits.shape[0], dtype=np.int64)
        else:
            pow2 = (1 << np.arange(len(self.subset))).astype(np.int64)
            idx = bits[:, list(self.subset)].astype(np.int64) @ pow2
        return self.table[idx]

    def to_dict(self) -> dict:
        return {"variant": "Lookup", "subset": list(self.subset), "table": self.table.tolist()}


StructuredMap = Union[LinearMix, FirstOne, Lookup]


# ---------------------------------------------------------------------------
# Instances
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContextModel:
    """Variable probabilities and reward kernel of one intermediate context."""

    q: np.ndarray
    reward_map: StructuredMap

    def __post_init__(self) -> None:
        object.__setattr__(self, "q", _frozen_array(self.q))
        if self.q.ndim != 1:
            raise ValueError("q must be a 1-D vector")


@dataclass(frozen=True)
class CausalInstance:
    """Ground-truth environment: start-state kernel plus k reward contexts.

    Construction only enforces shape consistency; semantic invariants
    (probability ranges, row sums, the intervention/conditioning identity)
    are checked by :func:`validate_instance`, which reports violations
    instead of raising.
    """

    k: int
    n: int
    q0: np.ndarray
    transition_map: StructuredMap
    contexts: tuple[ContextModel, ...]

    def __post_init__(self) -> None:
        if self.k < 1 or self.n < 1:
            raise ValueError("need k >= 1 contexts and n >= 1 variables")
        object.__setattr__(self, "q0", _frozen_array(self.q0))
        object.__setattr__(self, "contexts", tuple(self.contexts))
        if self.q0.shape != (self.n,):
            raise ValueError(f"q0 must have shape ({self.n},)")
        if len(self.contexts) != self.k:
            raise ValueError(f"expected {self.k} context models, got {len(self.contexts)}")
        for i, ctx in enumerate(self.contexts):
            if ctx.q.shape != (self.n,):
                raise ValueError(f"contexts[{i}].q must have shape ({self.n},)")

    @property
    def num_interventions(self) -> int:
        return num_interventions(self.n)


@dataclass(frozen=True)
class Observation:
    """One full round of interaction."""

    start_intervention: Intervention
    start_realization: np.ndarray
    context: int
    context_intervention: Intervention
    context_realization: np.ndarray
    reward: int


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    issues: tuple[str, ...]
    max_identity_violation: float

    def __bool__(self) -> bool:
        return self.ok


def _enumeration_conditional(
    smap: StructuredMap, q: np.ndarray, j: int, x: int
):
    """Conditional expected outcome given X_j = x, by explicit enumeration.

    Enumerates every assignment of the variables the kernel actually reads
    (plus variable j) and marginalizes the rest; independent of the
    closed-form path in ``exact_value``.
    """
    n = q.size
    if isinstance(smap, Lookup):
        relevant = sorted(set(smap.subset) | {j})
    else:
        relevant = list(range(n))
    pos = relevant.index(j)
    m = len(relevant)
    grid = ((np.arange(2 ** m)[:, None] >> np.arange(m)) & 1).astype(np.uint8)
    keep = grid[:, pos] == x
    grid = grid[keep]
    bits = np.zeros((grid.shape[0], n), dtype=np.uint8)
    bits[:, relevant] = grid
    p = q[relevant]
    weights = np.prod(np.where(grid == 1, p, 1.0 - p), axis=1)
    total = weights.sum()
    values = smap.values_for(bits)
    return (weights @ values) / total


def validate_instance(inst: CausalInstance, enum_limit: int = 16) -> ValidationReport:
    """Check all instance invariants and the conditioning identity.

    The identity check compares the closed-form row under do(Xj=x) with the
    enumeration-based conditional given Xj = x, for every (j, x) whose
    conditioning event has positive probability; pairs whose enumeration
    would exceed 2**enum_limit assignments are skipped (the O(n) marginal
    decomposition of do() over each variable is still verified).
    """
    issues: list[str] = []
    for name, q in [("q0", inst.q0)] + [
        (f"contexts[{i}].q", ctx.q) for i, ctx in enumerate(inst.contexts)
    ]:
        if np.any(q < 0.0) or np.any(q > 1.0):
            issues.append(f"{name}: entries must lie in [0, 1]")
    issues += inst.transition_map.check(inst.n, inst.k, "transition_map")
    for i, ctx in enumerate(inst.contexts):
        issues += ctx.reward_map.check(inst.n, None, f"contexts[{i}].reward_map")

    max_violation = 0.0
    if not issues:
        kernels = [(inst.transition_map, inst.q0, "transition_map")] + [
            (ctx.reward_map, ctx.q, f"contexts[{i}].reward_map")
            for i, ctx in enumerate(inst.contexts)
        ]
        for smap, q, name in kernels:
            for j in range(inst.n):
                do_row = smap.exact_value(q, None)
                mix = q[j] * smap.exact_value(q, (j, 1)) + (1.0 - q[j]) * smap.exact_value(q, (j, 0))
                gap = float(np.max(np.abs(np.atleast_1d(do_row - mix))))
                max_violation = max(max_violation, gap)
                if gap > PROB_TOL:
                    issues.append(f"{name}: do() does not decompose over variable {j} (gap {gap:.3g})")
                relevant = len(smap.subset) + 1 if isinstance(smap, Lookup) else inst.n
                if relevant > enum_limit:
                    continue
                for x in (0, 1):
                    if (q[j] if x == 1 else 1.0 - q[j]) <= 0.0:
                        continue
                    cond = _enumeration_conditional(smap, q, j, x)
                    row = smap.exact_value(q, (j, x))
                    gap = float(np.max(np.abs(np.atleast_1d(cond - row))))
                    max_violation = max(max_violation, gap)
                    if gap > PROB_TOL:
                        issues.append(
                            f"{name}: conditioning on X{j}={x} differs from "
                            f"intervening (gap {gap:.3g})"
                        )
    return ValidationReport(ok=not issues, issues=tuple(issues), max_identity_violation=max_violation)


# ---------------------------------------------------------------------------
# Exact matrices
# ---------------------------------------------------------------------------


def _forced_for(iv: Intervention) -> tuple[int, int] | None:
    return None if iv.is_do_nothing else (iv.var, iv.value)


def true_transition_matrix(inst: CausalInstance) -> np.ndarray:
    """Exact (N, k) matrix of context distributions, one row per action."""
    rows = [
        inst.transition_map.exact_value(inst.q0, _forced_for(Intervention.from_index(a)))
        for a in range(inst.num_interventions)
    ]
    return np.asarray(rows, dtype=float)


def true_reward_matrix(inst: CausalInstance) -> np.ndarray:
    """Exact (N, k) matrix of expected rewards per (action, context)."""
    out = np.empty((inst.num_interventions, inst.k))
    for i, ctx in enumerate(inst.contexts):
        for a in range(inst.num_interventions):
            out[a, i] = ctx.reward_map.exact_value(ctx.q, _forced_for(Intervention.from_index(a)))
    return out


def transition_threshold(P: np.ndarray) -> float:
    """Smallest strictly positive transition probability in P."""
    P = np.asarray(P, dtype=float)
    positive = P[P > 0.0]
    if positive.size == 0:
        raise ValueError("degenerate transition matrix: all entries are zero")
    return float(positive.min())


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------


def _fast_value_fn(smap: StructuredMap) -> Callable[[np.ndarray], np.ndarray | float]:
    """Single-realization outcome evaluator, specialized per kernel kind."""
    if isinstance(smap, LinearMix):
        base = smap.weights @ smap.tables[:, 0]
        delta = (
            smap.weights * (smap.tables[:, 1] - smap.tables[:, 0])
            if smap.scalar
            else smap.weights[:, None] * (smap.tables[:, 1] - smap.tables[:, 0])
        )
        return lambda bits: base + bits @ delta
    if isinstance(smap, FirstOne):
        outcomes, default = smap.outcomes, smap.default

        def first_one(bits: np.ndarray):
            j = int(bits.argmax())
            return outcomes[j] if bits[j] else default

        return first_one
    pow2 = (1 << np.arange(len(smap.subset))).astype(np.int64)
    subset = list(smap.subset)
    table = smap.table

    def lookup(bits: np.ndarray):
        return table[int(bits[subset] @ pow2)] if subset else table[0]

    return lookup


class Simulator:
    """Stateless sampling front-end for a validated instance.

    All methods are pure given (instance, rng); a single Simulator can be
    shared across concurrent runs as long as each run owns its generator.
    """

    def __init__(self, inst: CausalInstance):
        self.inst = inst
        self.n = inst.n
        self.k = inst.k
        self.num_interventions = inst.num_interventions
        self._ctx_q = np.stack([ctx.q for ctx in inst.contexts])
        self._transition_one = _fast_value_fn(inst.transition_map)
        self._reward_one = [_fast_value_fn(ctx.reward_map) for ctx in inst.contexts]

    def _check_action(self, a: int) -> Intervention:
        if not 0 <= a < self.num_interventions:
            raise ValueError(f"intervention index {a} out of range for n={self.n}")
        return Intervention.from_index(a)

    def _sample_bits(self, q: np.ndarray, iv: Intervention, count: int, rng) -> np.ndarray:
        bits = (rng.random((count, self.n)) < q).astype(np.uint8)
        if not iv.is_do_nothing:
            bits[:, iv.var] = iv.value
        return bits

    @staticmethod
    def _sample_rows(rows: np.ndarray, rng) -> np.ndarray:
        cdf = np.cumsum(rows, axis=1)
        u = rng.random((rows.shape[0], 1))
        return np.minimum((cdf < u).sum(axis=1), rows.shape[1] - 1)

    def sample_start(self, a: int, count: int, rng) -> tuple[np.ndarray, np.ndarray]:
        """Perform action a at the start state ``count`` times.

        Returns the (count, n) start realizations and the (count,) reached
        context indices.
        """
        iv = self._check_action(a)
        bits = self._sample_bits(self.inst.q0, iv, count, rng)
        rows = self.inst.transition_map.values_for(bits)
        return bits, self._sample_rows(rows, rng)

    def sample_context(self, i: int, a: int, count: int, rng) -> tuple[np.ndarray, np.ndarray]:
        """Perform action a at context i ``count`` times.

        Returns the (count, n) context realizations and the (count,) binary
        rewards.
        """
        iv = self._check_action(a)
        bits = self._sample_bits(self._ctx_q[i], iv, count, rng)
        p = self.inst.contexts[i].reward_map.values_for(bits)
        rewards = (rng.random(count) < p).astype(np.uint8)
        return bits, rewards

    def play_start_one(self, a: int, rng) -> int:
        """One start round by action index; returns the reached context only."""
        bits = rng.random(self.n) < self.inst.q0
        if a:
            j, x = divmod(a - 1, 2)
            bits[j] = bool(x)
        row = self._transition_one(bits)
        cdf = np.cumsum(row)
        return min(int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right")), self.k - 1)

    def play_context_one(self, i: int, a: int, rng) -> int:
        """One context round by action index; returns the binary reward only."""
        bits = rng.random(self.n) < self._ctx_q[i]
        if a:
            j, x = divmod(a - 1, 2)
            bits[j] = bool(x)
        return 1 if rng.random() < self._reward_one[i](bits) else 0

    def _marginals(self) -> tuple[np.ndarray, np.ndarray]:
        if not hasattr(self, "_marginal_tables"):
            P = true_transition_matrix(self.inst)
            self._marginal_tables = (np.cumsum(P, axis=1), true_reward_matrix(self.inst))
        return self._marginal_tables

    def sample_start_marginal(self, a: int, count: int, rng) -> np.ndarray:
        """Contexts reached by ``count`` rounds of action a, marginally.

        Exactly distributed as the contexts from :meth:`sample_start`; valid
        whenever the caller never conditions on the start realization.
        """
        self._check_action(a)
        cum_p, _ = self._marginals()
        total = cum_p[a, -1]
        return np.minimum(
            np.searchsorted(cum_p[a], rng.random(count) * total, side="right"),
            self.k - 1,
        )

    def play_start_marginal(self, a: int, rng) -> int:
        """Context reached by one round of action a, marginally.

        Hot path: ``a`` is not validated.
        """
        cum_p, _ = self._marginals()
        ctx = int(np.searchsorted(cum_p[a], rng.random() * cum_p[a, -1], side="right"))
        return min(ctx, self.k - 1)

    def sample_context_marginal(self, i: int, a: int, count: int, rng) -> np.ndarray:
        """Rewards of ``count`` rounds of action a at context i, marginally."""
        self._check_action(a)
        _, rewards = self._marginals()
        return (rng.random(count) < rewards[a, i]).astype(np.uint8)

    def play_context_marginal(self, i: int, a: int, rng) -> int:
        """Binary reward of action a at context i, marginally (exact mean).

        Hot path: ``a`` is not validated.
        """
        _, rewards = self._marginals()
        return 1 if rng.random() < rewards[a, i] else 0

    def play_round(
        self, a0: Intervention, choose: Callable[[int], Intervention], rng
    ) -> Observation:
        start_bits, contexts = self.sample_start(a0.index, 1, rng)
        context = int(contexts[0])
        chosen = choose(context)
        if not isinstance(chosen, Intervention):
            raise TypeError("context callback must return an Intervention")
        if not chosen.is_do_nothing and not 0 <= chosen.var < self.n:
            raise ValueError(f"context intervention {chosen!r} out of range for n={self.n}")
        ctx_bits, rewards = self.sample_context(context, chosen.index, 1, rng)
        return Observation(
            start_intervention=a0,
            start_realization=start_bits[0],
            context=context,
            context_intervention=chosen,
            context_realization=ctx_bits[0],
            reward=int(rewards[0]),
        )


def sample_round(
    inst: CausalInstance,
    rng: np.random.Generator,
    a0: Intervention,
    choose: Callable[[int], Intervention],
) -> Observation:
    """Play one round: intervene at the start, transition, intervene, reward."""
    if not a0.is_do_nothing and not 0 <= a0.var < inst.n:
        raise ValueError(f"start intervention {a0!r} out of range for n={inst.n}")
    return Simulator(inst).play_round(a0, choose, rng)


# ---------------------------------------------------------------------------
# Instance files
# ---------------------------------------------------------------------------


def _require_fields(obj: dict, required: Sequence[str], where: str) -> None:
    missing = [f for f in required if f not in obj]
    if missing:
        raise ValueError(f"{where}: missing fields {missing}")
    unknown = [f for f in obj if f not in required]
    if unknown:
        raise ValueError(f"{where}: unknown fields {unknown}")


def _map_from_dict(obj: dict, where: str) -> StructuredMap:
    if not isinstance(obj, dict) or "variant" not in obj:
        raise ValueError(f"{where}: structured map must be an object with a 'variant' tag")
    variant = obj["variant"]
    if variant == "LinearMix":
        _require_fields(obj, ["variant", "weights", "tables"], where)
        return LinearMix(weights=obj["weights"], tables=obj["tables"])
    if variant == "FirstOne":
        _require_fields(obj, ["variant", "outcomes", "default"], where)
        return FirstOne(outcomes=obj["outcomes"], default=obj["default"])
    if variant == "Lookup":
        _require_fields(obj, ["variant", "subset", "table"], where)
        return Lookup(subset=tuple(obj["subset"]), table=obj["table"])
    raise ValueError(f"{where}: unknown structured map variant {variant!r}")


def instance_to_dict(inst: CausalInstance) -> dict:
    return {
        "k": inst.k,
        "n": inst.n,
        "q0": inst.q0.tolist(),
        "transition_map": inst.transition_map.to_dict(),
        "contexts": [
            {"q": ctx.q.tolist(), "reward_map": ctx.reward_map.to_dict()}
            for ctx in inst.contexts
        ],
    }


def instance_from_dict(obj: dict) -> CausalInstance:
    _require_fields(obj, ["k", "n", "q0", "transition_map", "contexts"], "instance")
    contexts = []
    for i, ctx in enumerate(obj["contexts"]):
        _require_fields(ctx, ["q", "reward_map"], f"contexts[{i}]")
        contexts.append(
            ContextModel(q=ctx["q"], reward_map=_map_from_dict(ctx["reward_map"], f"contexts[{i}].reward_map"))
        )
    return CausalInstance(
        k=int(obj["k"]),
        n=int(obj["n"]),
        q0=obj["q0"],
        transition_map=_map_from_dict(obj["transition_map"], "transition_map"),
        contexts=tuple(contexts),
    )


def save_instance(inst: CausalInstance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(inst), indent=2) + "\n")


def load_instance(path: str | Path) -> CausalInstance:
    return instance_from_dict(json.loads(Path(path).read_text()))
