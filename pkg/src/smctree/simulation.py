"""Sequence generation from a probabilistic context tree."""

from __future__ import annotations

from collections import deque

import numpy as np

from .errors import UnresolvablePastError
from .trees import (
    Alphabet,
    Context,
    ContextTree,
    ProbabilisticContextTree,
    context_of,
)

RHYTHM_ALPHABET = Alphabet(("0", "1", "2", "3", "4"))

# Thirteen-context benchmark model on the rhythm alphabet: contexts are read
# oldest-to-newest, rows give the next-symbol distribution.
_RHYTHM_REFERENCE_ROWS: dict[Context, tuple[float, ...]] = {
    (0, 0, 0): (0.29, 0.71, 0.00, 0.00, 0.00),
    (1, 0, 0): (0.00, 0.00, 0.67, 0.21, 0.12),
    (2, 0, 0): (0.40, 0.60, 0.00, 0.00, 0.00),
    (3, 0, 0): (0.00, 0.00, 0.67, 0.22, 0.11),
    (1, 0):    (0.07, 0.00, 0.65, 0.21, 0.07),
    (2, 0):    (0.45, 0.55, 0.00, 0.00, 0.00),
    (3, 0):    (0.07, 0.00, 0.64, 0.25, 0.04),
    (0, 0, 1): (0.62, 0.00, 0.27, 0.08, 0.03),
    (2, 0, 1): (0.72, 0.00, 0.19, 0.07, 0.02),
    (2, 1):    (0.73, 0.00, 0.18, 0.08, 0.01),
    (2,):      (0.60, 0.40, 0.00, 0.00, 0.00),
    (3,):      (0.69, 0.00, 0.21, 0.10, 0.00),
    (4,):      (0.00, 0.00, 0.66, 0.34, 0.00),
}


def rhythm_reference_model() -> ProbabilisticContextTree:
    """The built-in thirteen-context rhythm model used by the study scripts."""
    tree = ContextTree.from_contexts(_RHYTHM_REFERENCE_ROWS.keys())
    return ProbabilisticContextTree(tree=tree, probs=dict(_RHYTHM_REFERENCE_ROWS))


def _default_start(model: ProbabilisticContextTree,
                   rng: np.random.Generator) -> tuple[int, ...]:
    # Prefer a single-symbol context (for the rhythm model this is the
    # sentence boundary, a renewal state); otherwise draw histories until one
    # resolves.
    singles = sorted(w[0] for w in model.tree.contexts if len(w) == 1)
    if singles:
        return (singles[-1],)
    height = max(model.tree.height, 1)
    m = model.num_symbols
    for _ in range(1000):
        cand = tuple(int(s) for s in rng.integers(0, m, size=height))
        if context_of(model.tree, cand) is not None:
            return cand
    raise UnresolvablePastError("could not draw an initial history that resolves to a context")


def simulate(model: ProbabilisticContextTree, n: int, seed: int,
             burn_in: int = 1000, start: tuple[int, ...] | None = None) -> np.ndarray:
    """Generate ``n`` symbols from the model after a discarded burn-in.

    Symbols are drawn by inverse CDF over the alphabet in index order from a
    seeded PCG64 stream, so runs are reproducible across platforms.  Raises
    when the running history has no context in the tree.
    """
    if n < 0:
        raise ValueError("sequence length must be non-negative")
    rng = np.random.default_rng(seed)
    if n == 0:
        return np.empty(0, dtype=np.int64)
    contexts = model.tree.contexts
    height = max(model.tree.height, 1)
    cumulative = {w: np.cumsum(model.row(w)) for w in contexts}
    last_positive = {w: max(i for i, p in enumerate(model.row(w)) if p > 0) for w in contexts}

    history = deque(start if start is not None else _default_start(model, rng),
                    maxlen=height)
    total = burn_in + n
    out = np.empty(total, dtype=np.int64)
    uniforms = rng.random(total)
    for t in range(total):
        w = context_of(model.tree, history)
        if w is None:
            raise UnresolvablePastError(
                f"history {tuple(history)!r} resolves to no context of the tree"
            )
        cum = cumulative[w]
        a = int(np.searchsorted(cum, uniforms[t], side="right"))
        if a > last_positive[w]:
            a = last_positive[w]
        out[t] = a
        history.append(a)
    return out[burn_in:]
