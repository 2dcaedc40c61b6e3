"""First-order Markov models of interaction partners.

The state is the last observed partner.  Transition probabilities are raw
relative frequencies with no smoothing; a state that has never been left
falls back to the marginal distribution of all transition targets.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .core import Alphabet, CategoricalSequence, EmpiricalDistribution, encode_labels
from .entropy import plugin_entropy
from .ingest import BinnedEventStream

__all__ = [
    "EvaluationResult",
    "MarkovModel",
    "WindowScore",
    "fit",
    "format_model_dump",
    "mc_entropy_rate",
    "rolling_evaluate",
    "top_k",
    "transition_probs",
    "update",
]

WEEK = 7 * 86400


@dataclass
class MarkovModel:
    """Transition counts ``counts[s, t]`` over the states of ``alphabet``."""

    alphabet: Alphabet = field(default_factory=lambda: Alphabet(()))
    counts: np.ndarray = None

    def __post_init__(self):
        if self.counts is None:
            self.counts = np.zeros((self.k, self.k), dtype=np.int64)
        if self.counts.shape != (self.k, self.k):
            raise ValueError("counts must be K x K for the model alphabet")

    @property
    def k(self) -> int:
        return self.alphabet.size

    @property
    def state_counts(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def target_counts(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def copy(self) -> MarkovModel:
        return MarkovModel(self.alphabet, self.counts.copy())

    def _grow(self, labels):
        alphabet = self.alphabet.extend(labels)
        if alphabet.size != self.k:
            counts = np.zeros((alphabet.size, alphabet.size), dtype=np.int64)
            counts[: self.k, : self.k] = self.counts
            self.alphabet, self.counts = alphabet, counts


def update(model: MarkovModel, seq: CategoricalSequence, bridge: int | None = None) -> MarkovModel:
    """Add the transitions of ``seq`` to ``model`` in place and return it.

    Symbols are matched by label, so ``seq`` may use its own alphabet; new
    labels grow the model.  ``bridge`` is a model state code; when given, the
    transition ``bridge -> seq[0]`` is counted too.
    """
    if seq.n == 0:
        return model
    if bridge is not None and not 0 <= bridge < model.k:
        raise ValueError(f"bridge state {bridge} outside 0..{model.k - 1}")
    model._grow(seq.alphabet.labels[c] for c in np.unique(seq.codes).tolist())
    lookup = np.array([model.alphabet.encode(label) if label in model.alphabet else -1
                       for label in seq.alphabet.labels], dtype=np.int64)
    states = lookup[seq.codes]
    if bridge is not None:
        states = np.concatenate(([bridge], states))
    np.add.at(model.counts, (states[:-1], states[1:]), 1)
    return model


def fit(seq: CategoricalSequence) -> MarkovModel:
    """Count adjacent pairs of ``seq``.  The model alphabet is that of ``seq``."""
    if seq.n < 2:
        raise ValueError(f"fitting a Markov chain needs at least 2 symbols, got {seq.n}")
    model = MarkovModel(seq.alphabet)
    np.add.at(model.counts, (seq.codes[:-1], seq.codes[1:]), 1)
    return model


def _check_state(model: MarkovModel, s: int):
    if not 0 <= s < model.k:
        raise ValueError(f"state {s} outside 0..{model.k - 1}")


def _target_marginal(model: MarkovModel) -> np.ndarray:
    targets = model.target_counts
    if targets.sum() == 0:
        return np.full(model.k, 1.0 / model.k)
    return targets / targets.sum()


def transition_probs(model: MarkovModel, s: int) -> EmpiricalDistribution:
    _check_state(model, s)
    row = model.counts[s]
    total = row.sum()
    if total == 0:
        return EmpiricalDistribution(_target_marginal(model))
    return EmpiricalDistribution(row / total)


def mc_entropy_rate(model: MarkovModel) -> float:
    """Plug-in entropy rate: row entropies weighted by source frequency."""
    weights = model.state_counts
    total = weights.sum()
    if total == 0:
        raise ValueError("model has no transitions")
    rate = 0.0
    for s in np.flatnonzero(weights).tolist():
        rate += weights[s] / total * plugin_entropy(EmpiricalDistribution(model.counts[s] / weights[s]))
    return float(rate)


def top_k(model: MarkovModel, s: int, k: int) -> list[int]:
    """The ``k`` most likely next states from ``s``, ties to the lower code.

    When fewer than ``k`` targets have positive probability the list is
    padded with the remaining states in order of marginal target frequency.
    """
    if k < 1:
        raise ValueError("k must be positive")
    probs = transition_probs(model, s).probs
    codes = np.arange(model.k)
    ranked = [int(c) for c in np.lexsort((codes, -probs)) if probs[c] > 0]
    if len(ranked) < k:
        marg = _target_marginal(model)
        chosen = set(ranked)
        ranked += [int(c) for c in np.lexsort((codes, -marg)) if int(c) not in chosen]
    return ranked[:k]


@dataclass(frozen=True)
class WindowScore:
    window_index: int
    events_evaluated: int
    hits: dict

    @property
    def top1_hits(self) -> int:
        return self.hits.get(1, 0)

    @property
    def top5_hits(self) -> int:
        return self.hits.get(5, 0)


@dataclass(frozen=True)
class EvaluationResult:
    """Per-window and overall top-k hit counts from :func:`rolling_evaluate`.

    Predictions are counted per interaction event (stream entry).
    """

    windows: tuple
    ks: tuple = (1, 5)

    @property
    def events_evaluated(self) -> int:
        return sum(w.events_evaluated for w in self.windows)

    def hits(self, k: int) -> int:
        return sum(w.hits[k] for w in self.windows)

    def accuracy(self, k: int) -> float:
        n = self.events_evaluated
        return self.hits(k) / n if n else 0.0

    @property
    def overall_top1(self) -> float:
        return self.accuracy(1)

    @property
    def overall_top5(self) -> float:
        return self.accuracy(5)

    def as_dict(self) -> dict:
        return {
            "events_evaluated": self.events_evaluated,
            "accuracy": {f"top{k}": self.accuracy(k) for k in self.ks},
            "windows": [
                {"window_index": w.window_index, "events_evaluated": w.events_evaluated,
                 **{f"top{k}_hits": w.hits[k] for k in self.ks}}
                for w in self.windows
            ],
        }


def rolling_evaluate(
    stream: BinnedEventStream,
    ego,
    window: int = WEEK,
    ks: Sequence[int] = (1, 5),
    bridge: bool = True,
) -> EvaluationResult:
    """Train on the first window, then predict-and-update window by window.

    Windows are ``window`` seconds long and start at the bin of ``ego``'s
    first entry.  Every entry of window ``w >= 1`` is scored against the model
    built from windows ``< w``; the state is the previously observed partner,
    carried across window boundaries.  The window's transitions are added
    only after all of its entries are scored.  With ``bridge=False`` the
    transition crossing into a window is not counted during updates.
    """
    ks = tuple(sorted(set(ks)))
    if not ks or ks[0] < 1:
        raise ValueError("ks must be positive integers")
    entries = stream[ego]
    origin = entries[0].bin * stream.bin_width
    groups: dict = {}
    for entry in entries:
        w = (entry.bin * stream.bin_width - origin) // window
        groups.setdefault(w, []).append(entry.alter)
    if len(groups) < 2:
        raise ValueError(f"ego {ego!r} spans fewer than two evaluation windows")

    model = MarkovModel()
    last = None
    scores = []
    for w in sorted(groups):
        partners = groups[w]
        if w > 0:
            scores.append(_score_window(model, w, last, partners, ks))
        b = model.alphabet.encode(last) if bridge and last is not None else None
        update(model, encode_labels(partners)[1], bridge=b)
        last = partners[-1]
    return EvaluationResult(tuple(scores), ks)


def _rank_from(model: MarkovModel, state, k: int) -> list[int]:
    # a partner first met in the current window is an unseen source state
    if state in model.alphabet:
        return top_k(model, model.alphabet.encode(state), k)
    marg = _target_marginal(model)
    return [int(c) for c in np.lexsort((np.arange(model.k), -marg))][:k]


def _score_window(model: MarkovModel, w: int, state, partners, ks) -> WindowScore:
    hits = dict.fromkeys(ks, 0)
    # model is frozen within the window, so rankings can be reused
    rankings: dict = {}
    for alter in partners:
        # partners never seen in training cannot be predicted
        if alter in model.alphabet:
            if state not in rankings:
                ranked = _rank_from(model, state, ks[-1])
                rankings[state] = {model.alphabet.decode(c): pos for pos, c in enumerate(ranked)}
            pos = rankings[state].get(alter)
            if pos is not None:
                for k in ks:
                    hits[k] += pos < k
        state = alter
    return WindowScore(w, len(partners), hits)


def format_model_dump(model: MarkovModel) -> str:
    """Edge list ``source,target,probability`` for every observed transition."""
    lines = ["source,target,probability"]
    for s in range(model.k):
        row = model.counts[s]
        total = row.sum()
        for t in np.flatnonzero(row).tolist():
            lines.append(f"{model.alphabet.decode(s)},{model.alphabet.decode(t)},{row[t] / total:.12g}")
    return "\n".join(lines) + "\n"
