"""Synthetic sequences and event logs with known entropy rates.

All generators draw from ``numpy.random.default_rng`` (PCG64).  Per-ego
streams in :func:`gen_event_log` use ``SeedSequence([seed, ego_index])`` so
individuals are independent and reproducible in isolation.
"""

from __future__ import annotations

import bisect
import math
from collections.abc import Sequence

import numpy as np

from .core import CategoricalSequence, EmpiricalDistribution
from .ingest import EventLog, InteractionEvent

__all__ = [
    "analytic_markov_rate",
    "alter_label",
    "ego_label",
    "gen_event_log",
    "gen_iid",
    "gen_markov",
    "gen_periodic",
    "stationary_distribution",
    "stay_matrix",
    "transition_matrix",
]


def transition_matrix(P) -> np.ndarray:
    """Validate ``P`` as a square row-stochastic matrix and return a copy."""
    P = np.array(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] == 0:
        raise ValueError(f"transition matrix must be square and non-empty, got shape {P.shape}")
    if np.any(P < 0) or not np.all(np.isfinite(P)):
        raise ValueError("transition matrix entries must be finite and non-negative")
    sums = P.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > 1e-12):
        raise ValueError(f"transition matrix rows must sum to 1, got {sums.tolist()}")
    return P


def stay_matrix(stay: float, k: int = 2) -> np.ndarray:
    """Chain that keeps its state with probability ``stay`` and otherwise
    jumps uniformly to one of the other ``k - 1`` states."""
    if k < 2:
        raise ValueError("stay matrix needs at least two states")
    P = np.full((k, k), (1.0 - stay) / (k - 1))
    np.fill_diagonal(P, stay)
    return P


def gen_iid(dist: EmpiricalDistribution, n: int, seed: int) -> CategoricalSequence:
    rng = np.random.default_rng(seed)
    k = len(dist)
    codes = rng.choice(k, size=n, p=dist.probs)
    return CategoricalSequence.from_codes(codes, k)


def gen_markov(P, n: int, seed, start: int | None = None) -> CategoricalSequence:
    """Sample ``n`` steps of the chain ``P``; ``start`` defaults to a uniform draw."""
    P = transition_matrix(P)
    k = P.shape[0]
    rng = np.random.default_rng(seed)
    state = int(rng.integers(k)) if start is None else int(start)
    if not 0 <= state < k:
        raise ValueError(f"start state {state} outside 0..{k - 1}")
    cumulative = np.cumsum(P, axis=1)
    cumulative[:, -1] = 1.0
    rows = cumulative.tolist()
    draws = rng.random(max(n - 1, 0)).tolist()
    codes = [state]
    for u in draws:
        state = bisect.bisect_right(rows[state], u)
        codes.append(state)
    return CategoricalSequence.from_codes(codes[:n], k)


def gen_periodic(pattern: CategoricalSequence, n: int) -> CategoricalSequence:
    if pattern.n == 0:
        raise ValueError("periodic pattern must be non-empty")
    reps = -(-n // pattern.n)
    return CategoricalSequence(np.tile(pattern.codes, reps)[:n], pattern.alphabet)


def _period(P: np.ndarray) -> int:
    """Period of an irreducible chain: gcd of level differences along edges
    of a BFS layering from state 0."""
    adj = P > 0
    level = {0: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for s in frontier:
            for t in np.flatnonzero(adj[s]).tolist():
                if t not in level:
                    level[t] = level[s] + 1
                    nxt.append(t)
        frontier = nxt
    g = 0
    for s, t in zip(*np.nonzero(adj)):
        g = math.gcd(g, abs(level[int(s)] + 1 - level[int(t)]))
    return g


def _strongly_connected(P: np.ndarray) -> bool:
    adj = P > 0
    k = adj.shape[0]
    for graph in (adj, adj.T):
        seen = {0}
        frontier = [0]
        while frontier:
            s = frontier.pop()
            for t in np.flatnonzero(graph[s]).tolist():
                if t not in seen:
                    seen.add(t)
                    frontier.append(t)
        if len(seen) != k:
            return False
    return True


def stationary_distribution(P, tol: float = 1e-12, max_iter: int = 1_000_000) -> np.ndarray:
    """Stationary distribution by power iteration from the uniform vector.

    Raises ``ValueError`` for reducible or periodic chains, and when the
    iteration fails to reach ``tol`` within ``max_iter`` steps.
    """
    P = transition_matrix(P)
    if not _strongly_connected(P):
        raise ValueError("chain is reducible; stationary distribution is not unique")
    if _period(P) != 1:
        raise ValueError("chain is periodic; power iteration does not converge")
    k = P.shape[0]
    pi = np.full(k, 1.0 / k)
    for _ in range(max_iter):
        nxt = pi @ P
        nxt /= nxt.sum()
        if np.abs(nxt - pi).sum() <= tol:
            return nxt
        pi = nxt
    raise ValueError("power iteration did not converge")


def analytic_markov_rate(P) -> float:
    """Exact entropy rate of a stationary irreducible aperiodic chain, in bits."""
    P = transition_matrix(P)
    pi = stationary_distribution(P)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(P > 0, -P * np.log2(P), 0.0)
    return float(pi @ terms.sum(axis=1))


def ego_label(index: int) -> str:
    return f"e{index:04d}"


def alter_label(state: int) -> str:
    return f"a{state}"


def location_label(state: int) -> str:
    return f"L{state}"


def gen_event_log(
    population: int,
    P,
    span: int,
    bin_width: int = 300,
    seed: int = 0,
    location_P=None,
) -> EventLog:
    """Synthetic log with one event per bin for every ego.

    ``P`` is either one matrix shared by everybody or a list with one matrix
    per ego.  Ego ``i`` is labelled ``ego_label(i)`` and its partner in bin
    ``b`` is ``alter_label(state_b)``, so ingesting the log recovers the
    generated chains exactly.  If ``location_P`` is given, each event also
    carries a location drawn from an independent chain.
    """
    n_bins = span // bin_width
    per_ego = _per_ego(P, population)
    per_ego_loc = _per_ego(location_P, population) if location_P is not None else None
    events = []
    for i in range(population):
        seq = gen_markov(per_ego[i], n_bins, np.random.SeedSequence([seed, i]))
        locs = None
        if per_ego_loc is not None:
            locs = gen_markov(per_ego_loc[i], n_bins, np.random.SeedSequence([seed, i, 1])).codes.tolist()
        ego = ego_label(i)
        for b, state in enumerate(seq.codes.tolist()):
            loc = location_label(locs[b]) if locs is not None else None
            events.append(InteractionEvent(b * bin_width, ego, alter_label(state), loc))
    return EventLog(events, bin_width)


def _per_ego(P, population: int) -> Sequence:
    if isinstance(P, (list, tuple)) and P and np.ndim(P[0]) == 2:
        if len(P) != population:
            raise ValueError(f"got {len(P)} matrices for {population} individuals")
        return list(P)
    return [P] * population
