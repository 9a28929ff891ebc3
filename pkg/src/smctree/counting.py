"""Suffix-window counting over a sample.

Every counted window, regardless of its length, ends at one of the positions
``d+1 .. n`` (1-based), so exactly ``n - d`` windows of each length are
counted and the likelihoods of different trees stay comparable.  Note that
with this shared range the total of the one-symbol-longer counts
``sum_b N(wb)`` can differ from ``N(w)`` by one at the sample boundary; the
former is the denominator used for transition estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codes import decode_context, encode_context
from .errors import InstanceTooLargeError, SampleTooShortError, UnobservedContextError
from .trees import Alphabet, Context, sequence_data

# Below this table size, counts are accumulated in a dense array first.
_DENSE_LIMIT = 1 << 22


@dataclass(frozen=True)
class LevelCounts:
    """Sorted packed codes and counts of every observed string of one length."""

    codes: np.ndarray
    counts: np.ndarray


@dataclass(frozen=True)
class CountTrie:
    """Counts of all strings of length 1 .. d+1 observed in one sample.

    ``levels[L]`` holds the strings of length ``L`` (``levels[0]`` is unused).
    Only observed strings are materialized.  Instances are immutable and safe
    for concurrent readers.
    """

    alphabet_size: int
    depth: int
    n: int
    levels: tuple

    @property
    def window_count(self) -> int:
        return self.n - self.depth

    def count(self, w: Context) -> int:
        """Number of windows ending at positions d+1..n that equal ``w``."""
        w = tuple(w)
        if len(w) == 0:
            return self.window_count
        if len(w) > self.depth + 1:
            return 0
        level = self.levels[len(w)]
        code = encode_context(w, self.alphabet_size)
        i = int(np.searchsorted(level.codes, code))
        if i < level.codes.size and level.codes[i] == code:
            return int(level.counts[i])
        return 0

    def next_counts(self, w: Context) -> np.ndarray:
        """The vector ``N(wa)`` for every symbol ``a``."""
        w = tuple(w)
        if len(w) > self.depth:
            raise ValueError(f"string longer than depth {self.depth}: {w!r}")
        m = self.alphabet_size
        code = encode_context(w, m)
        return self.next_counts_batch(len(w), np.asarray([code], dtype=np.int64))[0]

    def next_counts_batch(self, length: int, codes: np.ndarray) -> np.ndarray:
        """Rows of ``N(wa)`` for many strings of one length at once."""
        m = self.alphabet_size
        level = self.levels[length + 1]
        cand = codes.reshape(-1, 1) * m + np.arange(m, dtype=np.int64)
        if level.codes.size == 0:
            return np.zeros(cand.shape, dtype=np.int64)
        pos = np.searchsorted(level.codes, cand)
        pos_c = np.minimum(pos, level.codes.size - 1)
        hit = (pos < level.codes.size) & (level.codes[pos_c] == cand)
        return np.where(hit, level.counts[pos_c], 0)

    def after_total(self, w: Context) -> int:
        return int(self.next_counts(w).sum())

    def mle(self, w: Context) -> np.ndarray:
        counts = self.next_counts(w)
        total = counts.sum()
        if total == 0:
            raise UnobservedContextError(f"unobserved context: {tuple(w)!r}")
        return counts / float(total)

    def dump_lines(self, alphabet: Alphabet | None = None) -> list[str]:
        """Debug dump: ``<string><tab><count>`` sorted lexicographically."""
        rows = []
        for length in range(1, self.depth + 2):
            level = self.levels[length]
            for code, cnt in zip(level.codes.tolist(), level.counts.tolist()):
                w = decode_context(code, length, self.alphabet_size)
                text = "".join(alphabet.symbols[s] for s in w) if alphabet else "".join(map(str, w))
                rows.append((text, int(cnt)))
        rows.sort()
        return [f"{text}\t{cnt}" for text, cnt in rows]


def build_count_trie(x, d: int, alphabet_size: int | None = None) -> CountTrie:
    """Count every string of length 1 .. d+1 over windows ending at d+1..n.

    Parameters
    ----------
    x : SymbolSequence or array-like of int
        The sample.
    d : int
        Maximum context length; windows of length up to ``d + 1`` are counted.
    alphabet_size : int, optional
        Required for raw arrays whose alphabet is larger than the symbols
        present; inferred from a SymbolSequence.
    """
    arr, m_seq = sequence_data(x)
    m = alphabet_size if alphabet_size is not None else m_seq
    if m is None:
        if arr.size == 0:
            raise SampleTooShortError("sample too short: empty sequence")
        m = int(arr.max()) + 1
    if arr.size and (arr.min() < 0 or arr.max() >= m):
        raise ValueError("sequence contains indices outside the alphabet")
    if d < 1:
        raise ValueError("depth must be at least 1")
    n = int(arr.size)
    if n <= d:
        raise SampleTooShortError(f"sample too short: depth {d} needs more than {d} symbols, got {n}")
    if (d + 1) * math.log2(m) > 62:
        raise InstanceTooLargeError(f"alphabet size {m} at depth {d} exceeds the packing range")

    codes = np.zeros(n - d, dtype=np.int64)
    power = 1
    for k in range(d + 1):
        codes += arr[d - k: n - k] * power
        power *= m

    levels: list = [None] * (d + 2)
    table_size = m ** (d + 1)
    if table_size <= _DENSE_LIMIT:
        dense = np.bincount(codes, minlength=table_size)
        for length in range(d + 1, 0, -1):
            observed = np.flatnonzero(dense)
            levels[length] = LevelCounts(observed.astype(np.int64), dense[observed].astype(np.int64))
            if length > 1:
                dense = dense.reshape(m, -1).sum(axis=0)
    else:
        observed, counts = np.unique(codes, return_counts=True)
        levels[d + 1] = LevelCounts(observed, counts.astype(np.int64))
        for length in range(d, 0, -1):
            upper = levels[length + 1]
            parents = upper.codes % (m ** length)
            uniq, inverse = np.unique(parents, return_inverse=True)
            agg = np.zeros(uniq.size, dtype=np.int64)
            np.add.at(agg, inverse, upper.counts)
            levels[length] = LevelCounts(uniq, agg)

    return CountTrie(alphabet_size=m, depth=d, n=n, levels=tuple(levels))


def mle(trie: CountTrie, w: Context) -> np.ndarray:
    """Maximum-likelihood next-symbol distribution after ``w``.

    Component ``a`` is ``N(wa) / sum_b N(wb)``; symbols never observed after
    ``w`` get exactly zero.
    """
    return trie.mle(w)
