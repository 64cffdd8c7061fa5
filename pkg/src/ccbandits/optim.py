"""Exploration-design programs over the start-state action simplex.

Two programs are solved here, both over frequency vectors f (distributions
over the N start actions):

* the max-min reach program  max_f min_i (P^T f)_i, a small dense LP used
  to guarantee every context is visited often enough, and
* the min-max design program  min_f max_a sum_i P[a,i] sqrt(m_i) /
  sqrt((P^T f)_i), whose squared optimum is the instance's exploration
  efficacy; its optimizer prescribes how to split a sampling budget so the
  worst action's reward-estimation error is minimized.

The min-max program is convex (each row is a nonnegative combination of
convex terms c (v.f)^{-1/2}) and is solved by entropic subgradient descent
with a normalized decaying step, annealed restarts from the incumbent, and
best-iterate tracking; iterates stay strictly positive so the inverse
square roots stay finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

SIMPLEX_TOL = 1e-9
#: Relative objective-change stall threshold for the min-max solver.
STALL_TOL = 1e-8
DEFAULT_MAX_ITER = 50_000


@dataclass(frozen=True)
class LambdaResult:
    """Exploration efficacy with its minimizing frequency vector."""

    lam: float
    minimizer: np.ndarray = field(repr=False)
    objective_trace: tuple[tuple[int, float], ...] = field(repr=False)
    converged: bool = True


def is_frequency_vector(f: np.ndarray, tol: float = SIMPLEX_TOL) -> bool:
    f = np.asarray(f, dtype=float)
    return bool(f.ndim == 1 and np.all(f >= 0.0) and abs(float(f.sum()) - 1.0) <= tol)


def _as_matrix(P: np.ndarray) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] == 0 or P.shape[1] == 0:
        raise ValueError("P must be a non-empty 2-D matrix")
    return P


def objective_value(P: np.ndarray, m: np.ndarray, f: np.ndarray) -> float:
    """Worst-action design score max_a sum_i P[a,i] sqrt(m_i / (P^T f)_i).

    Contexts whose entire column of P is zero are unreachable and are
    skipped.  A reachable context carrying zero mass under f makes every
    action with weight on it score +inf.
    """
    P = _as_matrix(P)
    m = np.asarray(m, dtype=float)
    f = np.asarray(f, dtype=float)
    if m.shape != (P.shape[1],) or f.shape != (P.shape[0],):
        raise ValueError(
            f"shape mismatch: P is {P.shape}, m is {m.shape}, f is {f.shape}"
        )
    y = P.T @ f
    dead = ~P.any(axis=0)
    starved = (y <= 0.0) & ~dead
    if np.any(starved):
        if np.any(P[:, starved] > 0.0):
            return float("inf")
    with np.errstate(divide="ignore"):
        scale = np.sqrt(m) / np.sqrt(y)
    scale[dead | starved] = 0.0
    return float((P @ scale).max())


def maximin_lp(P: np.ndarray) -> np.ndarray:
    """Frequency vector maximizing the least-reached context mass.

    Solved exactly as the equivalent small dense LP
    max {z : P^T f >= z 1, f in the simplex}.
    """
    P = _as_matrix(P)
    N, k = P.shape
    cost = np.zeros(N + 1)
    cost[-1] = -1.0
    A_ub = np.hstack([-P.T, np.ones((k, 1))])
    A_eq = np.zeros((1, N + 1))
    A_eq[0, :N] = 1.0
    res = linprog(
        cost,
        A_ub=A_ub,
        b_ub=np.zeros(k),
        A_eq=A_eq,
        b_eq=[1.0],
        bounds=[(0.0, None)] * N + [(None, None)],
        method="highs",
    )
    if not res.success:
        raise RuntimeError(f"max-min reach LP failed: {res.message}")
    f = np.clip(res.x[:N], 0.0, None)
    return f / f.sum()


def _minmax_subgradient(P: np.ndarray, sqm: np.ndarray, y: np.ndarray):
    scores = P @ (sqm / np.sqrt(y))
    a = int(np.argmax(scores))
    coeff = -0.5 * P[a] * sqm * y ** -1.5
    return float(scores[a]), P @ coeff


def convex_minmax(
    P: np.ndarray,
    m: np.ndarray,
    *,
    max_iter: int = DEFAULT_MAX_ITER,
    rel_tol: float = STALL_TOL,
    anneal_tol: float = 1e-6,
    step_scale: float = 0.5,
    window: int = 400,
    anneal: float = 0.6,
) -> tuple[np.ndarray, float, LambdaResult]:
    """Minimize the worst-action design score over the simplex.

    Entropic subgradient descent from the uniform vector: the step along
    the active-row subgradient is normalized by its sup-norm and decays as
    1/sqrt(t).  Whenever a window of iterations fails to improve the
    incumbent by anneal_tol (relative), the step scale is annealed and the
    iterate reset to the incumbent; once annealing has engaged, a window
    with relative improvement below rel_tol ends the solve.  Hitting the
    iteration cap instead is reported through the ``converged`` flag.
    Returns (best iterate, its objective, diagnostics).
    """
    P = _as_matrix(P)
    m = np.asarray(m, dtype=float)
    if m.shape != (P.shape[1],):
        raise ValueError(f"m has shape {m.shape}, expected ({P.shape[1]},)")
    if np.any(m < 1.0):
        raise ValueError("per-context thresholds must be >= 1")
    live = P.any(axis=0)
    P_live = P[:, live]
    sqm = np.sqrt(m[live])
    N = P.shape[0]

    f = np.full(N, 1.0 / N)
    if P_live.shape[1] == 0:
        result = LambdaResult(0.0, f, ((0, 0.0),), True)
        return f, 0.0, result

    best_f = f.copy()
    best_val = objective_value(P, m, f)
    trace: list[tuple[int, float]] = [(0, best_val)]
    window_best = best_val
    scale = step_scale
    converged = False
    annealed = False
    t = 0
    for t in range(1, max_iter + 1):
        val, g = _minmax_subgradient(P_live, sqm, P_live.T @ f)
        if not np.isfinite(val):
            raise FloatingPointError("non-finite objective during min-max solve")
        if val < best_val:
            best_val = val
            best_f = f.copy()
            trace.append((t, best_val))
        g_norm = float(np.max(np.abs(g)))
        if g_norm == 0.0:
            converged = True
            break
        f = f * np.exp(-(scale / (g_norm * np.sqrt(t))) * g)
        f /= f.sum()
        if t % window == 0:
            improvement = window_best - best_val
            floor = max(best_val, np.finfo(float).tiny)
            if annealed and improvement < rel_tol * floor:
                converged = True
                break
            if improvement < anneal_tol * floor:
                scale *= anneal
                f = best_f.copy()
                annealed = True
            window_best = best_val
    trace.append((t, best_val))
    diag = LambdaResult(best_val**2, best_f, tuple(trace), converged)
    return best_f, best_val, diag


def lambda_of(P: np.ndarray, m: np.ndarray, **solver_kwargs) -> LambdaResult:
    """Exploration efficacy: squared optimum of the min-max design program."""
    _, _, result = convex_minmax(P, m, **solver_kwargs)
    return result
