"""Alphabets, symbol sequences, context trees, and the suffix partial order.

Contexts are tuples of symbol indices stored most-recent-symbol-last, so the
printed form reads left to right from the oldest remembered symbol to the one
immediately before the present.  All types here are immutable after
construction and safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InvalidTreeError

Context = tuple[int, ...]

EMPTY_CONTEXT: Context = ()


class TreeOrder(Enum):
    """Outcome of comparing two context trees under suffix refinement."""

    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    INCOMPARABLE = "incomparable"


def is_suffix(s: Sequence[int], w: Sequence[int], proper: bool = False) -> bool:
    """True if ``s`` equals the trailing symbols of ``w``.

    The empty string is a suffix of every string.  With ``proper=True`` the
    two strings must additionally differ in length.
    """
    ls, lw = len(s), len(w)
    if ls > lw or (proper and ls == lw):
        return False
    if ls == 0:
        return True
    return tuple(w[lw - ls:]) == tuple(s)


@dataclass(frozen=True)
class Alphabet:
    """An ordered set of distinct, non-empty symbol tokens."""

    symbols: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        symbols = tuple(self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if not symbols:
            raise ValueError("alphabet must contain at least one token")
        if any(not tok for tok in symbols):
            raise ValueError("alphabet tokens must be non-empty")
        if len(set(symbols)) != len(symbols):
            raise ValueError("alphabet tokens must be pairwise distinct")
        object.__setattr__(self, "_index", {tok: i for i, tok in enumerate(symbols)})

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise KeyError(f"token {token!r} is not in the alphabet") from None

    def encode(self, tokens: Iterable[str]) -> np.ndarray:
        return np.fromiter((self.index(t) for t in tokens), dtype=np.int64)

    def decode(self, indices: Iterable[int]) -> list[str]:
        return [self.symbols[int(i)] for i in indices]

    def format_context(self, context: Context) -> str:
        return "".join(self.symbols[i] for i in context) if context else "<root>"


@dataclass(frozen=True)
class SymbolSequence:
    """A finite sample of symbol indices over an alphabet."""

    data: np.ndarray
    alphabet: Alphabet

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("sequence data must be one-dimensional")
        if arr.size and (arr.min() < 0 or arr.max() >= self.alphabet.size):
            raise ValueError("sequence contains indices outside the alphabet")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    def __len__(self) -> int:
        return int(self.data.size)

    def tokens(self) -> list[str]:
        return self.alphabet.decode(self.data)


def sequence_data(x) -> tuple[np.ndarray, int | None]:
    """Normalize a sequence-like input to (int64 array, alphabet size or None)."""
    if isinstance(x, SymbolSequence):
        return np.asarray(x.data, dtype=np.int64), x.alphabet.size
    arr = np.asarray(x, dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError("sequence data must be one-dimensional")
    return arr, None


def validate_tree(contexts: Iterable[Context]) -> str | None:
    """Check the suffix property and irreducibility of a context set.

    Returns ``None`` when both hold, otherwise a description of the first
    violated condition with the offending context(s).
    """
    ctxs = {tuple(c) for c in contexts}
    if not ctxs:
        return "a context tree must contain at least one context"
    for w in sorted(ctxs):
        for j in range(1, len(w) + 1):
            s = w[j:]
            if s in ctxs:
                return f"suffix property violated: {s!r} is a proper suffix of {w!r}"
    # With the suffix property in hand, a context is removable exactly when no
    # other context shares its one-symbol-shorter suffix.
    cover: dict[Context, int] = {}
    for w in ctxs:
        for j in range(len(w) + 1):
            s = w[j:]
            cover[s] = cover.get(s, 0) + 1
    for w in sorted(ctxs):
        if len(w) >= 1 and cover.get(w[1:], 0) == 1:
            return f"irreducibility violated: {w!r} can be shortened to {w[1:]!r}"
    return None


@dataclass(frozen=True)
class ContextTree:
    """A suffix-free, irreducible set of contexts.

    The root-only tree is the singleton holding the empty context; it has
    height 0 and one context.
    """

    contexts: frozenset[Context]

    def __post_init__(self) -> None:
        ctxs = frozenset(tuple(c) for c in self.contexts)
        object.__setattr__(self, "contexts", ctxs)
        violation = validate_tree(ctxs)
        if violation is not None:
            raise InvalidTreeError(violation)

    @classmethod
    def from_contexts(cls, contexts: Iterable[Context]) -> "ContextTree":
        return cls(frozenset(tuple(c) for c in contexts))

    @classmethod
    def _trusted(cls, contexts: frozenset) -> "ContextTree":
        # For construction sites that guarantee validity structurally (the
        # penalized-likelihood sweep); skips re-validation.
        obj = cls.__new__(cls)
        object.__setattr__(obj, "contexts", contexts)
        return obj

    @classmethod
    def root(cls) -> "ContextTree":
        return cls(frozenset({EMPTY_CONTEXT}))

    @property
    def height(self) -> int:
        return max(len(w) for w in self.contexts)

    @property
    def is_root_only(self) -> bool:
        return self.contexts == frozenset({EMPTY_CONTEXT})

    def __len__(self) -> int:
        return len(self.contexts)

    def __iter__(self) -> Iterator[Context]:
        return iter(sorted(self.contexts, key=lambda w: (len(w), w)))


def _covers(ctxs: frozenset[Context], v: Context) -> bool:
    # Some suffix of v (proper or not, down to the empty string) is in ctxs.
    return any(v[j:] in ctxs for j in range(len(v) + 1))


def compare_trees(a: ContextTree, b: ContextTree) -> TreeOrder:
    """Compare two trees under the refinement order.

    ``LESS`` means ``a`` is coarser: every context of ``b`` extends some
    context of ``a``.  The root-only tree is below every other tree.
    """
    if a.contexts == b.contexts:
        return TreeOrder.EQUAL
    a_below_b = all(_covers(a.contexts, v) for v in b.contexts)
    b_below_a = all(_covers(b.contexts, v) for v in a.contexts)
    if a_below_b and not b_below_a:
        return TreeOrder.LESS
    if b_below_a and not a_below_b:
        return TreeOrder.GREATER
    if a_below_b and b_below_a:
        # Mutual refinement of suffix-free sets forces equality.
        return TreeOrder.EQUAL
    return TreeOrder.INCOMPARABLE


def context_of(tree: ContextTree, past: Sequence[int]) -> Context | None:
    """Return the unique context of ``tree`` that is a suffix of ``past``.

    Returns ``None`` when no context matches, which can happen for short
    pasts or trees that do not cover every possible history.
    """
    ctxs = tree.contexts
    pt = tuple(past)
    lp = len(pt)
    for k in range(0, min(lp, tree.height) + 1):
        cand = pt[lp - k:] if k else EMPTY_CONTEXT
        if cand in ctxs:
            return cand
    return None


@dataclass(frozen=True)
class ProbabilisticContextTree:
    """A context tree together with one next-symbol distribution per context."""

    tree: ContextTree
    probs: dict

    def __post_init__(self) -> None:
        rows = {tuple(w): tuple(float(p) for p in row) for w, row in self.probs.items()}
        object.__setattr__(self, "probs", rows)
        if set(rows) != set(self.tree.contexts):
            raise ValueError("probs must have exactly one entry per context")
        widths = {len(row) for row in rows.values()}
        if len(widths) != 1:
            raise ValueError("all probability rows must have the same length")
        width = widths.pop()
        top = max((max(w) for w in rows if w), default=-1)
        if width <= top:
            raise ValueError("probability rows are narrower than the symbols used")
        for w, row in rows.items():
            if any(p < 0.0 for p in row):
                raise ValueError(f"negative probability in row for context {w!r}")
            if abs(sum(row) - 1.0) > 1e-12:
                raise ValueError(f"row for context {w!r} does not sum to 1")

    @property
    def num_symbols(self) -> int:
        return len(next(iter(self.probs.values())))

    def row(self, context: Context) -> tuple[float, ...]:
        return self.probs[tuple(context)]
