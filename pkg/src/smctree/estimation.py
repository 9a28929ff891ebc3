"""Penalized-likelihood tree selection.

``CtmSolver`` maximizes ``log L(tree) - c * df(tree) * log n`` exactly over
all admissible trees by a bottom-up sweep of the observed-string trie, for
any penalty constant ``c``.  ``champion_set`` enumerates the full solution
path over ``c`` by recursive interval splitting, and
``brute_force_champions`` recomputes the same object by explicit enumeration
on small instances, serving as an independent oracle.

Admissible trees have height at most the counting depth, every context
observed, and every observed string covered; additionally no context can be
shortened without breaking validity.  The sweep realizes the last point by
forcing a node with a single observed child to stay internal along that
chain, which matters only when the incidence rule gives the child fewer
allowed transitions than its parent.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .codes import decode_context, encode_context
from .constraints import DofMode
from .counting import CountTrie, build_count_trie
from .errors import (
    DepthExceededError,
    InstanceTooLargeError,
    UnobservedContextError,
)
from .trees import (
    Context,
    ContextTree,
    EMPTY_CONTEXT,
    ProbabilisticContextTree,
    TreeOrder,
    compare_trees,
)

# Margin a child-split must exceed to beat keeping the node as a leaf; exact
# penalized-score ties therefore prune toward the smaller tree.
TIE_EPS = 1e-9

_C_START = 1e-12


def _loglik_rows(counts: np.ndarray) -> np.ndarray:
    """Per-row ``sum_a N_a log N_a - N log N`` with the 0 log 0 = 0 convention."""
    counts = counts.astype(np.float64)
    totals = counts.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        term = np.where(counts > 0, counts * np.log(counts), 0.0).sum(axis=1)
        total_term = np.where(totals > 0, totals * np.log(totals), 0.0)
    return term - total_term


def _grouped_codes(tree: ContextTree, m: int) -> list[tuple[int, np.ndarray, list[Context]]]:
    """Tree contexts grouped by length, code-sorted within each group."""
    by_length: dict[int, list[Context]] = {}
    for w in tree.contexts:
        by_length.setdefault(len(w), []).append(w)
    groups = []
    for length in sorted(by_length):
        ws = sorted(by_length[length])
        codes = np.asarray([encode_context(w, m) for w in ws], dtype=np.int64)
        groups.append((length, codes, ws))
    return groups


def _loglik_by_group(tree: ContextTree, trie: CountTrie):
    if tree.height > trie.depth:
        raise DepthExceededError(
            f"tree height {tree.height} exceeds counting depth {trie.depth}"
        )
    for length, codes, ws in _grouped_codes(tree, trie.alphabet_size):
        counts = trie.next_counts_batch(length, codes)
        totals = counts.sum(axis=1)
        if (totals == 0).any():
            w = ws[int(np.flatnonzero(totals == 0)[0])]
            raise UnobservedContextError(f"unobserved context: {w!r}")
        yield ws, _loglik_rows(counts)


def per_context_log_likelihood(tree: ContextTree, trie: CountTrie) -> dict[Context, float]:
    """Each context's contribution ``sum_a N(wa) log p_hat(a|w)``."""
    out: dict[Context, float] = {}
    for ws, rows in _loglik_by_group(tree, trie):
        for w, value in zip(ws, rows.tolist()):
            out[w] = value
    return out


def log_likelihood(tree: ContextTree, trie: CountTrie) -> float:
    """Sample log-likelihood of a tree under per-context maximum likelihood.

    Summation runs over length groups in a fixed order, so repeated calls
    give bit-identical totals.
    """
    return float(sum(rows.sum() for _, rows in _loglik_by_group(tree, trie)))


def tree_penalty_df(tree: ContextTree, trie_or_m, rule, mode: DofMode) -> int:
    """Degrees of freedom of a tree, evaluated through the rule's batch path."""
    m = trie_or_m.alphabet_size if isinstance(trie_or_m, CountTrie) else int(trie_or_m)
    total = 0
    for length, codes, _ in _grouped_codes(tree, m):
        allowed = rule.chi_matrix(codes, length, m).sum(axis=1).astype(np.int64)
        if mode is not DofMode.ALLOWED:
            allowed = np.maximum(allowed - 1, 0)
        total += int(allowed.sum())
    return total


def fit_pct(tree: ContextTree, trie: CountTrie) -> ProbabilisticContextTree:
    """Attach the estimated next-symbol distribution to every context."""
    probs = {w: tuple(trie.mle(w)) for w in tree}
    return ProbabilisticContextTree(tree=tree, probs=probs)


class CtmSolver:
    """Exact bottom-up maximizer of the penalized log-likelihood.

    The observed-string skeleton (node likelihood terms, allowed-transition
    degrees, child grouping) is built once per (trie, rule, mode); ``solve``
    then runs in a few vector sweeps per penalty constant.
    """

    def __init__(self, trie: CountTrie, rule, mode: DofMode):
        self.trie = trie
        self.rule = rule
        self.mode = mode
        m, d = trie.alphabet_size, trie.depth
        self.log_n = math.log(trie.n)

        self._codes: list[np.ndarray] = []
        self._ll: list[np.ndarray] = []
        self._dof: list[np.ndarray] = []
        for level in range(d + 1):
            upper = trie.levels[level + 1]
            codes = np.unique(upper.codes // m)
            counts = trie.next_counts_batch(level, codes)
            chis = rule.chi_matrix(codes, level, m)
            allowed = chis.sum(axis=1).astype(np.int64)
            dof = allowed if mode is DofMode.ALLOWED else np.maximum(allowed - 1, 0)
            self._codes.append(codes)
            self._ll.append(_loglik_rows(counts))
            self._dof.append(dof)

        # Children of a node at `level` are the level+1 nodes whose code drops
        # to it after removing the oldest symbol.
        self._child_order: list = [None]
        self._seg_bounds: list = [None]
        self._child_count: list = [None]
        for level in range(1, d + 1):
            parents = self._codes[level] % (m ** (level - 1))
            order = np.argsort(parents, kind="stable")
            sorted_parents = parents[order]
            bounds = np.searchsorted(sorted_parents, self._codes[level - 1])
            bounds = np.append(bounds, sorted_parents.size)
            counts = np.diff(bounds)
            if counts.min(initial=1) < 1:
                raise AssertionError("observed node below depth has no observed child")
            self._child_order.append(order)
            self._seg_bounds.append(bounds)
            self._child_count.append(counts)
        self._readoff_cache: dict[bytes, tuple[ContextTree, float, int]] = {}

    def solve(self, c: float) -> ContextTree:
        """The admissible tree maximizing ``log L - c * df * log n``."""
        return self.solve_described(c)[0]

    def solve_described(self, c: float) -> tuple[ContextTree, float, int]:
        """The maximizing tree together with its log-likelihood and df."""
        if c <= 0:
            raise ValueError("the penalty constant must be positive")
        d = self.trie.depth
        pen = c * self.log_n
        expand: list = [None] * (d + 1)
        value_next: np.ndarray | None = None
        split_next: np.ndarray | None = None
        for level in range(d, -1, -1):
            leaf_value = self._ll[level] - pen * self._dof[level]
            if level == d:
                split = np.full(leaf_value.shape, -np.inf)
            else:
                order = self._child_order[level + 1]
                starts = self._seg_bounds[level + 1][:-1]
                best_sum = np.add.reduceat(value_next[order], starts)
                forced_sum = np.add.reduceat(split_next[order], starts)
                split = np.where(self._child_count[level + 1] == 1, forced_sum, best_sum)
            grow = split > leaf_value + TIE_EPS
            expand[level] = grow
            value_next = np.where(grow, split, leaf_value)
            split_next = split

        # The expansion pattern pins the tree; identical patterns reached from
        # different constants share one materialized ContextTree.
        key = b"".join(level_grow.tobytes() for level_grow in expand)
        cached = self._readoff_cache.get(key)
        if cached is not None:
            return cached

        leaf_idx: list[list[int]] = [[] for _ in range(d + 1)]
        stack = [(0, 0, False)]
        while stack:
            level, idx, forced = stack.pop()
            if not forced and not expand[level][idx]:
                leaf_idx[level].append(idx)
                continue
            start = self._seg_bounds[level + 1][idx]
            end = self._seg_bounds[level + 1][idx + 1]
            children = self._child_order[level + 1][start:end]
            force_child = (end - start) == 1
            for child_idx in children:
                stack.append((level + 1, int(child_idx), force_child))

        m = self.trie.alphabet_size
        contexts: list[Context] = []
        loglik = 0.0
        df = 0
        for level in range(d + 1):
            if not leaf_idx[level]:
                continue
            idx = np.asarray(sorted(leaf_idx[level]), dtype=np.int64)
            loglik += float(self._ll[level][idx].sum())
            df += int(self._dof[level][idx].sum())
            codes = self._codes[level][idx]
            if level == 0:
                contexts.append(EMPTY_CONTEXT)
                continue
            digits = (codes[:, None] // (m ** np.arange(level, dtype=np.int64))) % m
            contexts.extend(tuple(row[::-1]) for row in digits.tolist())
        result = (ContextTree._trusted(frozenset(contexts)), loglik, df)
        self._readoff_cache[key] = result
        return result


def bic_estimate(trie: CountTrie, c: float, rule, mode: DofMode) -> ContextTree:
    """Penalized-likelihood tree estimate for one penalty constant."""
    return CtmSolver(trie, rule, mode).solve(c)


@dataclass(frozen=True)
class ChampionEntry:
    """One tree of the solution path with its penalty interval [c_lo, c_hi)."""

    tree: ContextTree
    loglik: float
    df: int
    leaves: int
    c_lo: float
    c_hi: float


@dataclass
class ChampionSet:
    """The solution path over the penalty constant, largest tree first.

    Along the list the log-likelihood and degrees of freedom strictly
    decrease, consecutive trees are strictly nested, and the half-open
    penalty intervals partition the positive axis.
    """

    entries: list[ChampionEntry]
    n: int
    d: int
    alphabet_size: int
    rule_description: str
    dof_mode: DofMode

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def smallest_first(self) -> list[ChampionEntry]:
        return list(reversed(self.entries))

    def trees(self) -> list[ContextTree]:
        return [e.tree for e in self.entries]

    def validate(self) -> None:
        entries = self.entries
        if not entries:
            raise AssertionError("champion set is empty")
        if entries[0].c_lo != 0.0 or not math.isinf(entries[-1].c_hi):
            raise AssertionError("intervals do not span the positive axis")
        for first, second in zip(entries, entries[1:]):
            if not (first.loglik > second.loglik and first.df > second.df):
                raise AssertionError("likelihood/df not strictly decreasing")
            if first.c_hi != second.c_lo:
                raise AssertionError("intervals do not abut")
            if not (first.c_lo < first.c_hi):
                raise AssertionError("empty penalty interval")
            if compare_trees(first.tree, second.tree) is not TreeOrder.GREATER:
                raise AssertionError("consecutive champions are not strictly nested")


def _assemble(champions: dict[ContextTree, tuple[float, int]], boundaries: list[float],
              trie: CountTrie, rule, mode: DofMode) -> ChampionSet:
    ordered = sorted(champions.items(), key=lambda kv: -kv[1][1])
    cuts = sorted(boundaries)
    if len(cuts) != len(ordered) - 1:
        raise AssertionError("boundary count does not match champion count")
    lows = [0.0] + cuts
    highs = cuts + [math.inf]
    entries = [
        ChampionEntry(tree=t, loglik=ll, df=df, leaves=len(t), c_lo=lo, c_hi=hi)
        for (t, (ll, df)), lo, hi in zip(ordered, lows, highs)
    ]
    return ChampionSet(
        entries=entries,
        n=trie.n,
        d=trie.depth,
        alphabet_size=trie.alphabet_size,
        rule_description=rule.describe(),
        dof_mode=mode,
    )


def champion_set(trie: CountTrie, rule, mode: DofMode) -> ChampionSet:
    """Enumerate the whole solution path exactly.

    Works by evaluating the penalized maximizer at interval endpoints and
    splitting at the crossing constant of the two endpoint trees until every
    boundary is pinned.  Each recursion step either certifies a boundary or
    discovers an unseen tree, so it terminates.
    """
    solver = CtmSolver(trie, rule, mode)
    log_n = solver.log_n

    champions: dict[ContextTree, tuple[float, int]] = {}

    t_low, ll_low, df_low = solver.solve_described(_C_START)
    champions[t_low] = (ll_low, df_low)
    ll_root = log_likelihood(ContextTree.root(), trie)
    c_high = (ll_low - ll_root) / log_n + 1.0
    t_high, ll_high, df_high = solver.solve_described(c_high)
    champions[t_high] = (ll_high, df_high)

    boundaries: list[float] = []

    def split(c_a: float, t_a: ContextTree, c_b: float, t_b: ContextTree) -> None:
        if t_a == t_b:
            return
        ll_a, df_a = champions[t_a]
        ll_b, df_b = champions[t_b]
        if df_a <= df_b:
            raise AssertionError("endpoint trees are not ordered by degrees of freedom")
        c_star = (ll_a - ll_b) / ((df_a - df_b) * log_n)
        c_star = min(max(c_star, c_a), c_b)
        if c_b - c_a < 1e-15 * max(c_b, 1.0):
            boundaries.append(c_star)
            return
        t_mid, ll_mid, df_mid = solver.solve_described(c_star)
        if t_mid == t_a or t_mid == t_b:
            boundaries.append(c_star)
            return
        champions[t_mid] = (ll_mid, df_mid)
        split(c_a, t_a, c_star, t_mid)
        split(c_star, t_mid, c_b, t_b)

    split(_C_START, t_low, c_high, t_high)
    return _assemble(champions, boundaries, trie, rule, mode)


def _active_children_map(trie: CountTrie) -> dict[Context, list[Context]]:
    m, d = trie.alphabet_size, trie.depth
    kids: dict[Context, list[Context]] = {}
    for level in range(1, d + 1):
        codes = np.unique(trie.levels[level + 1].codes // m)
        for code in codes.tolist():
            child = decode_context(code, level, m)
            kids.setdefault(child[1:], []).append(child)
    return kids


def _maximal_tree(kids: dict[Context, list[Context]], d: int) -> list[Context]:
    def deepest(w: Context, may_leaf: bool) -> list[Context] | None:
        children = kids.get(w, []) if len(w) < d else []
        if len(children) == 1:
            inner = deepest(children[0], False)
            if inner is not None:
                return inner
            return [w] if may_leaf else None
        if len(children) >= 2:
            parts = [deepest(u, True) for u in children]
            return [ctx for part in parts for ctx in part]
        return [w] if may_leaf else None

    result = deepest(EMPTY_CONTEXT, True)
    assert result is not None
    return result


def enumerate_admissible_trees(trie: CountTrie, leaf_guard: int = 20) -> list[ContextTree]:
    """All admissible trees of the sample, by explicit recursion.

    Rejects instances whose deepest admissible tree has more than
    ``leaf_guard`` leaves.
    """
    kids = _active_children_map(trie)
    d = trie.depth
    maximal = _maximal_tree(kids, d)
    if len(maximal) > leaf_guard:
        raise InstanceTooLargeError(
            f"instance too large: deepest admissible tree has {len(maximal)} leaves (> {leaf_guard})"
        )

    def subtrees(w: Context, may_leaf: bool) -> list[tuple[Context, ...]]:
        options: list[tuple[Context, ...]] = []
        if may_leaf:
            options.append((w,))
        children = kids.get(w, []) if len(w) < d else []
        if len(children) == 1:
            options.extend(subtrees(children[0], False))
        elif len(children) >= 2:
            per_child = [subtrees(u, True) for u in children]
            for combo in itertools.product(*per_child):
                options.append(tuple(ctx for part in combo for ctx in part))
        return options

    return [ContextTree.from_contexts(ctxs) for ctxs in subtrees(EMPTY_CONTEXT, True)]


def brute_force_champions(x, d: int, rule, mode: DofMode,
                          alphabet_size: int | None = None) -> ChampionSet:
    """Independent oracle for the solution path on small instances.

    Enumerates every admissible tree, takes the likelihood maximizer per
    degrees-of-freedom value, keeps the strictly-improving ones, and reduces
    to the trees that maximize the penalized score for some constant (the
    vertices of the upper envelope over the penalty).
    """
    trie = build_count_trie(x, d, alphabet_size)
    log_n = math.log(trie.n)

    best_per_df: dict[int, tuple[float, int, list, ContextTree]] = {}
    for tree in enumerate_admissible_trees(trie):
        ll = log_likelihood(tree, trie)
        df = tree_penalty_df(tree, trie, rule, mode)
        key = (ll, -len(tree), sorted(tree.contexts, key=lambda w: (len(w), w)))
        cur = best_per_df.get(df)
        if cur is None or key > (cur[0], cur[1], cur[2]):
            best_per_df[df] = (ll, -len(tree), key[2], tree)

    frontier: list[tuple[int, float, ContextTree]] = []
    best_ll = -math.inf
    for df in sorted(best_per_df):
        ll, _, _, tree = best_per_df[df]
        if ll > best_ll:
            frontier.append((df, ll, tree))
            best_ll = ll

    # Upper envelope over the penalty: keep vertices with strictly decreasing
    # likelihood-per-df slopes; points on or below a chord are never the
    # penalized maximizer for any constant.
    hull: list[tuple[int, float, ContextTree]] = []
    for point in frontier:
        while len(hull) >= 2:
            (g1, l1, _), (g2, l2, _) = hull[-2], hull[-1]
            g3, l3, _ = point
            if (l2 - l1) * (g3 - g2) <= (l3 - l2) * (g2 - g1):
                hull.pop()
            else:
                break
        hull.append(point)

    champions = {tree: (ll, df) for df, ll, tree in hull}
    boundaries = []
    ordered = sorted(hull, key=lambda p: -p[0])
    for (g_big, ll_big, _), (g_small, ll_small, _) in zip(ordered, ordered[1:]):
        boundaries.append((ll_big - ll_small) / ((g_big - g_small) * log_n))
    return _assemble(champions, boundaries, trie, rule, mode)
