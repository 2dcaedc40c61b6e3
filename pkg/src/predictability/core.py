"""Alphabets and integer-coded categorical sequences.

Every estimator in the package consumes a :class:`CategoricalSequence`: a
vector of dense integer codes ``0..K-1`` together with the :class:`Alphabet`
that maps codes back to external labels.  Codes are always assigned in order
of first appearance, so ``K`` is the size of the observed support.
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Alphabet",
    "CategoricalSequence",
    "EmpiricalDistribution",
    "encode_labels",
    "marginal",
    "pair",
    "project",
]


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of distinct labels; code ``k`` decodes to ``labels[k]``."""

    labels: tuple
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        index = {label: code for code, label in enumerate(labels)}
        if len(index) != len(labels):
            raise ValueError("alphabet labels must be unique")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", index)

    @classmethod
    def of_size(cls, k: int) -> Alphabet:
        """Alphabet whose labels are the integers ``0..k-1``."""
        return cls(tuple(range(k)))

    @property
    def size(self) -> int:
        return len(self.labels)

    def __len__(self):
        return len(self.labels)

    def __contains__(self, label):
        return label in self._index

    def encode(self, label: Hashable) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"label {label!r} not in alphabet") from None

    def decode(self, code: int) -> Hashable:
        return self.labels[code]

    def extend(self, labels: Iterable[Hashable]) -> Alphabet:
        """Return a new alphabet with unseen ``labels`` appended in order."""
        new = list(self.labels)
        seen = set(self._index)
        for label in labels:
            if label not in seen:
                seen.add(label)
                new.append(label)
        if len(new) == len(self.labels):
            return self
        return Alphabet(tuple(new))


@dataclass(frozen=True)
class CategoricalSequence:
    """A symbol series over a finite alphabet.

    ``codes`` is stored as a read-only ``int64`` array.
    """

    codes: np.ndarray
    alphabet: Alphabet

    def __post_init__(self):
        codes = np.array(self.codes, dtype=np.int64).reshape(-1)
        if codes.size and (codes.min() < 0 or codes.max() >= self.alphabet.size):
            raise ValueError("sequence codes must lie in 0..K-1")
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)

    @classmethod
    def from_codes(cls, codes: Sequence[int], k: int | None = None) -> CategoricalSequence:
        """Wrap raw integer codes; labels are the codes themselves."""
        codes = np.asarray(codes, dtype=np.int64).reshape(-1)
        if k is None:
            k = int(codes.max()) + 1 if codes.size else 0
        return cls(codes, Alphabet.of_size(k))

    @property
    def n(self) -> int:
        return int(self.codes.size)

    @property
    def k(self) -> int:
        return self.alphabet.size

    def __len__(self):
        return self.n

    def __getitem__(self, item):
        if isinstance(item, slice):
            return CategoricalSequence(self.codes[item], self.alphabet)
        return int(self.codes[item])

    def decode(self) -> list:
        labels = self.alphabet.labels
        return [labels[c] for c in self.codes.tolist()]

    def relabel(self, permutation: Sequence[int]) -> CategoricalSequence:
        """Apply the code permutation ``k -> permutation[k]``."""
        perm = np.asarray(permutation, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(self.k)):
            raise ValueError("relabel expects a permutation of 0..K-1")
        labels = [None] * self.k
        for old, new in enumerate(perm.tolist()):
            labels[new] = self.alphabet.labels[old]
        return CategoricalSequence(perm[self.codes], Alphabet(tuple(labels)))


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Probability vector over the codes of an alphabet."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float).reshape(-1)
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise ValueError("probabilities must be finite and non-negative")
        if probs.size and abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {probs.sum()!r}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def __len__(self):
        return int(self.probs.size)


def _first_appearance_codes(keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Dense codes for ``keys`` in first-appearance order.

    Returns ``(codes, first_index)`` where ``first_index[k]`` is the position
    at which code ``k`` first occurs.
    """
    if keys.size == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    remap = np.empty_like(order)
    remap[order] = np.arange(order.size)
    return remap[inverse.reshape(-1)].astype(np.int64), first[order]


def encode_labels(labels: Iterable[Hashable]) -> tuple[Alphabet, CategoricalSequence]:
    """Code ``labels`` by order of first appearance.

    >>> alphabet, seq = encode_labels(["a", "b", "a"])
    >>> seq.codes.tolist(), alphabet.size
    ([0, 1, 0], 2)
    """
    index: dict = {}
    codes = []
    for label in labels:
        code = index.get(label)
        if code is None:
            code = index[label] = len(index)
        codes.append(code)
    alphabet = Alphabet(tuple(index))
    return alphabet, CategoricalSequence(np.asarray(codes, dtype=np.int64), alphabet)


def marginal(seq: CategoricalSequence) -> EmpiricalDistribution:
    """Relative frequency of each code in ``seq``."""
    if seq.n == 0:
        raise ValueError("marginal distribution of an empty sequence is undefined")
    counts = np.bincount(seq.codes, minlength=seq.k)
    return EmpiricalDistribution(counts / seq.n)


def pair(x: CategoricalSequence, y: CategoricalSequence) -> CategoricalSequence:
    """Sequence of ordered pairs ``(x[i], y[i])``.

    The output alphabet holds the observed pairs of labels, coded by first
    appearance.
    """
    if x.n != y.n:
        raise ValueError(f"cannot pair sequences of lengths {x.n} and {y.n}")
    keys = x.codes * max(y.k, 1) + y.codes
    codes, first = _first_appearance_codes(keys)
    xl, yl = x.alphabet.labels, y.alphabet.labels
    labels = tuple((xl[x.codes[i]], yl[y.codes[i]]) for i in first.tolist())
    return CategoricalSequence(codes, Alphabet(labels))


def project(seq: CategoricalSequence, axis: int) -> CategoricalSequence:
    """Recover one coordinate of a paired sequence (up to relabeling)."""
    return encode_labels(label[axis] for label in seq.decode())[1]
