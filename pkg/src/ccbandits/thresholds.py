"""Causal observational thresholds.

Under the empty intervention, each set-variable action do(Xj=x) is
"observed for free" whenever the realization happens to have Xj = x, which
occurs with probability qj (for x = 1) or 1 - qj (for x = 0).  The
threshold m of a context is the smallest budget tau >= 2 such that at most
tau actions are observed with probability below 1/tau; only those rare
actions ever need to be performed explicitly, the rest can be estimated
from passive observation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .interventions import Intervention

#: Threshold assigned to contexts with no observational data at all.
DEFAULT_THRESHOLD = 2


@dataclass(frozen=True)
class ThresholdResult:
    """Threshold m, the rare action set, and the observation probabilities.

    ``obs_probs`` has length 2n and is indexed by canonical intervention
    index minus one (the do-nothing action is always observed and is never
    a candidate).
    """

    m: int
    rare_set: frozenset[Intervention]
    obs_probs: np.ndarray = field(repr=False)

    def rare_indices(self) -> list[int]:
        """Canonical indices of the rare actions, ascending."""
        return sorted(iv.index for iv in self.rare_set)


def observation_probabilities(q: np.ndarray) -> np.ndarray:
    """Probability that each set-variable action is observed under do().

    Output order follows the canonical intervention order with the
    do-nothing entry dropped: (X0=0), (X0=1), (X1=0), (X1=1), ...
    """
    q = np.asarray(q, dtype=float)
    if q.ndim != 1 or q.size == 0:
        raise ValueError("q must be a non-empty 1-D probability vector")
    if np.any(q < 0.0) or np.any(q > 1.0):
        raise ValueError("q entries must lie in [0, 1]")
    probs = np.empty(2 * q.size)
    probs[0::2] = 1.0 - q
    probs[1::2] = q
    return probs


def causal_threshold(q: np.ndarray) -> ThresholdResult:
    """Compute the observational threshold of a context from its q vector.

    m is the smallest tau in {2, ..., 2n} whose rare set
    S_tau = {a : p_a < 1/tau} has at most tau members; tau = 2n always
    qualifies because at most one action per variable can have observation
    probability below 1/(2n).  Actions with p_a exactly equal to 1/tau
    count as observed (strict inequality).
    """
    probs = observation_probabilities(q)
    two_n = probs.size
    sorted_probs = np.sort(probs)
    for tau in range(2, two_n + 1):
        # |S_tau| = number of entries strictly below 1/tau
        size = int(np.searchsorted(sorted_probs, 1.0 / tau, side="left"))
        if size <= tau:
            rare = frozenset(
                Intervention.from_index(a + 1)
                for a in range(two_n)
                if probs[a] < 1.0 / tau
            )
            return ThresholdResult(m=tau, rare_set=rare, obs_probs=probs)
    raise AssertionError("tau = 2n always satisfies |S_tau| <= tau")


def empirical_q(realizations: np.ndarray) -> np.ndarray:
    """Coordinate-wise mean of observed binary realizations (rows)."""
    x = np.asarray(realizations, dtype=float)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if x.ndim != 2 or x.shape[0] == 0 or x.shape[1] == 0:
        raise ValueError("need at least one realization of at least one variable")
    return x.mean(axis=0)
