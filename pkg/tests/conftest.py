import numpy as np
import pytest

from smctree import Alphabet, ContextTree


@pytest.fixture
def binary_alphabet():
    return Alphabet(("0", "1"))


@pytest.fixture
def rhythm_tokens():
    return Alphabet(("0", "1", "2", "3", "4"))


@pytest.fixture
def alternating():
    return np.array([0, 1, 0, 1, 0, 1, 0, 1, 0, 1], dtype=np.int64)


def tree(*contexts):
    return ContextTree.from_contexts(contexts)


def naive_counts(x, d):
    """Reference counts: scan every window ending at positions d+1..n."""
    x = list(x)
    n = len(x)
    counts = {}
    for t in range(d, n):  # 0-based end position
        for length in range(1, d + 2):
            w = tuple(x[t - length + 1: t + 1])
            counts[w] = counts.get(w, 0) + 1
    return counts


def random_complete_tree(rng, m, max_depth, p_split=0.6):
    """A random tree where every internal node has all m children."""

    def grow(prefix):
        if len(prefix) < max_depth and rng.random() < p_split:
            out = []
            for a in range(m):
                out.extend(grow((a,) + prefix))
            return out
        return [prefix]

    contexts = grow(())
    return ContextTree.from_contexts(contexts)
