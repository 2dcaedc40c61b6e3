"""Entropy and entropy-rate estimators.

The Lempel-Ziv estimator is

    H = n log2(n) / sum_i L_i

where ``L_i`` is the length of the shortest substring starting at ``i`` that
does not start anywhere earlier.  Equivalently ``L_i`` is one more than the
longest previous factor at ``i``: the longest prefix of the suffix at ``i``
that also occurs starting at some ``j < i`` (overlap with ``i`` allowed).
When the whole suffix recurs, this gives ``L_i = n - i + 2`` (1-based ``i``).

:func:`match_lengths` computes all ``L_i`` in ``O(n log n)`` from a suffix
array and its LCP array.  :func:`match_lengths_naive` is the direct scan
used as a test oracle.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .core import CategoricalSequence, EmpiricalDistribution, marginal, pair

__all__ = [
    "EntropyReport",
    "MatchLengths",
    "analyze_sequence",
    "conditional_lz_rate",
    "effective_choices",
    "iid_rate",
    "joint_lz_rate",
    "lcp_array",
    "longest_previous_factor",
    "lz_rate",
    "match_lengths",
    "match_lengths_naive",
    "plugin_entropy",
    "suffix_array",
    "uniform_rate",
]


@dataclass(frozen=True)
class MatchLengths:
    lambdas: np.ndarray

    def __post_init__(self):
        lam = np.array(self.lambdas, dtype=np.int64).reshape(-1)
        lam.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)

    @property
    def total(self) -> int:
        return int(self.lambdas.sum())

    def __len__(self):
        return int(self.lambdas.size)

    def __eq__(self, other):
        if not isinstance(other, MatchLengths):
            return NotImplemented
        return np.array_equal(self.lambdas, other.lambdas)

    def tolist(self) -> list[int]:
        return self.lambdas.tolist()


@dataclass(frozen=True)
class EntropyReport:
    """Entropy summary for one sequence, all in bits per symbol."""

    h_lz: float
    h_iid: float
    h_unif: float
    n: int
    k: int
    h_cond: dict = field(default_factory=dict)

    @property
    def effective_choices(self) -> float:
        return effective_choices(self.h_lz)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "K": self.k,
            "h_lz": self.h_lz,
            "h_iid": self.h_iid,
            "h_unif": self.h_unif,
            "effective_choices": self.effective_choices,
            "h_cond": dict(sorted(self.h_cond.items())),
        }


# -- plug-in entropies -------------------------------------------------------


def plugin_entropy(dist: EmpiricalDistribution) -> float:
    """Shannon entropy in bits, with ``0 log 0 = 0``."""
    p = dist.probs[dist.probs > 0]
    return float(-(p * np.log2(p)).sum()) + 0.0


def uniform_rate(k: int) -> float:
    """Entropy rate of an iid process uniform over ``k`` outcomes."""
    if k < 1:
        raise ValueError("uniform rate needs at least one outcome")
    return math.log2(k)


def iid_rate(seq: CategoricalSequence) -> float:
    """Entropy rate of an iid process with the marginal of ``seq``."""
    if seq.n == 0:
        raise ValueError("iid rate of an empty sequence is undefined")
    # rounding can push the sum an ulp past log2(K)
    return min(plugin_entropy(marginal(seq)), uniform_rate(seq.k))


def effective_choices(h: float) -> float:
    """Number of equally likely outcomes carrying ``h`` bits."""
    return 2.0**h


# -- match lengths -----------------------------------------------------------


def suffix_array(codes) -> np.ndarray:
    """Suffix array of an integer sequence by prefix doubling.

    Shorter suffixes sort before longer ones that extend them.
    """
    rank = np.asarray(codes, dtype=np.int64).copy()
    n = rank.size
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    # densify so ranks start at 0
    _, rank = np.unique(rank, return_inverse=True)
    rank = rank.reshape(-1).astype(np.int64)
    sa = np.argsort(rank, kind="stable")
    step = 1
    while rank.max() < n - 1 and step < n:
        second = np.full(n, -1, dtype=np.int64)
        second[: n - step] = rank[step:]
        sa = np.lexsort((second, rank))
        r, s = rank[sa], second[sa]
        boundary = (r[1:] != r[:-1]) | (s[1:] != s[:-1])
        new_rank = np.empty(n, dtype=np.int64)
        new_rank[sa] = np.concatenate(([0], np.cumsum(boundary)))
        rank = new_rank
        step *= 2
    return sa.astype(np.int64)


def lcp_array(codes, sa) -> np.ndarray:
    """Kasai LCP: ``lcp[r]`` is the common prefix of suffixes ``sa[r-1]`` and ``sa[r]``.

    ``lcp[0] = 0``.
    """
    s = np.asarray(codes).tolist()
    sa_l = np.asarray(sa).tolist()
    n = len(s)
    rank = [0] * n
    for r, p in enumerate(sa_l):
        rank[p] = r
    lcp = [0] * n
    h = 0
    for i in range(n):
        r = rank[i]
        if r == 0:
            h = 0
            continue
        j = sa_l[r - 1]
        while i + h < n and j + h < n and s[i + h] == s[j + h]:
            h += 1
        lcp[r] = h
        if h:
            h -= 1
    return np.asarray(lcp, dtype=np.int64)


def longest_previous_factor(codes) -> np.ndarray:
    """Length of the longest prefix of each suffix that starts earlier too.

    Linear-time stack pass over the suffix array (Crochemore-Ilie).  For each
    suffix, the best earlier-starting partner is the nearest suffix in
    lexicographic order, on either side, with a smaller start position.
    """
    codes = np.asarray(codes)
    n = codes.size
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    sa_arr = suffix_array(codes)
    sa = sa_arr.tolist() + [-1]
    lcp = lcp_array(codes, sa_arr).tolist() + [0]
    lpf = [0] * n
    stack = [0]
    for i in range(1, n + 1):
        sa_i = sa[i]
        while stack:
            top = stack[-1]
            sa_top = sa[top]
            if sa_i < sa_top:
                lcp_top, lcp_i = lcp[top], lcp[i]
                lpf[sa_top] = lcp_top if lcp_top > lcp_i else lcp_i
                if lcp_top < lcp_i:
                    lcp[i] = lcp_top
            elif lcp[i] <= lcp[top]:
                lpf[sa_top] = lcp[top]
            else:
                break
            stack.pop()
        if i < n:
            stack.append(i)
    return np.asarray(lpf, dtype=np.int64)


def _require_nonempty(seq: CategoricalSequence):
    if seq.n == 0:
        raise ValueError("match lengths of an empty sequence are undefined")


def match_lengths(seq: CategoricalSequence) -> MatchLengths:
    """Shortest-novel-substring lengths for every position of ``seq``."""
    _require_nonempty(seq)
    return MatchLengths(longest_previous_factor(seq.codes) + 1)


def match_lengths_naive(seq: CategoricalSequence) -> MatchLengths:
    """Direct quadratic-per-position scan; reference for :func:`match_lengths`."""
    _require_nonempty(seq)
    s = seq.codes.tolist()
    n = len(s)
    out = []
    for i in range(n):
        best = 0
        for j in range(i):
            m = 0
            while i + m < n and s[j + m] == s[i + m]:
                m += 1
            best = max(best, m)
        out.append(best + 1)
    return MatchLengths(out)


# -- Lempel-Ziv rates --------------------------------------------------------


def lz_rate(seq: CategoricalSequence) -> float:
    """Lempel-Ziv entropy-rate estimate in bits per symbol."""
    if seq.n < 2:
        raise ValueError(f"LZ rate needs at least 2 symbols, got {seq.n}")
    n = seq.n
    return n * math.log2(n) / match_lengths(seq).total


def joint_lz_rate(x: CategoricalSequence, y: CategoricalSequence) -> float:
    """LZ estimate on the sequence of pairs ``(x[i], y[i])``."""
    return lz_rate(pair(x, y))


def conditional_lz_rate(x: CategoricalSequence, y: CategoricalSequence) -> float:
    """Estimate of H(X|Y) as joint rate minus the rate of ``y``.

    Not clamped: finite-sample values can be negative or exceed ``lz_rate(x)``.
    """
    return joint_lz_rate(x, y) - lz_rate(y)


def analyze_sequence(
    seq: CategoricalSequence,
    conditioners: Mapping[str, CategoricalSequence] | None = None,
) -> EntropyReport:
    """Bundle the LZ rate, both baselines and any conditional rates.

    A conditioner that cannot be evaluated (length mismatch, too short) is
    stored as ``None`` instead of aborting the report.
    """
    h_lz = lz_rate(seq)
    h_cond = {}
    for name, other in (conditioners or {}).items():
        try:
            h_cond[name] = conditional_lz_rate(seq, other)
        except ValueError:
            h_cond[name] = None
    return EntropyReport(
        h_lz=h_lz,
        h_iid=iid_rate(seq),
        h_unif=uniform_rate(seq.k),
        n=seq.n,
        k=seq.k,
        h_cond=h_cond,
    )
