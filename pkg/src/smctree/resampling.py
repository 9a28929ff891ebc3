"""Renewal-block bootstrap and the smallest-maximizer selection rule.

The sample is cut into independent blocks at a renewal symbol, resamples of
several sizes are drawn by concatenating blocks with replacement, and the
scaled likelihood gain between adjacent champion trees is summarized by
quartiles per resample size.  The selected tree is the smallest champion
beyond which those gains shrink like an overfitting term rather than stay
bounded away from zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .counting import build_count_trie
from .errors import InsufficientRenewalPointsError
from .estimation import ChampionEntry, ChampionSet, _loglik_rows
from .codes import encode_context
from .trees import Context, sequence_data


@dataclass(frozen=True)
class BlockStore:
    """Maximal segments of the sample, each ending at the renewal symbol.

    The renewal symbol appears in a block only at its final position, and the
    blocks followed by the discarded tail reassemble the original sample.
    """

    renewal: int
    blocks: tuple
    discarded_tail: int

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @property
    def total_length(self) -> int:
        return int(sum(b.size for b in self.blocks))


def split_renewal_blocks(x, renewal: int) -> BlockStore:
    """Cut the sample at every occurrence of the renewal symbol.

    A trailing segment that does not end with the renewal symbol is dropped
    and its length recorded.
    """
    arr, _ = sequence_data(x)
    positions = np.flatnonzero(arr == renewal)
    if positions.size == 0:
        raise InsufficientRenewalPointsError(
            f"insufficient renewal points: symbol {renewal} never occurs"
        )
    blocks = []
    start = 0
    for pos in positions.tolist():
        block = arr[start: pos + 1].copy()
        block.setflags(write=False)
        blocks.append(block)
        start = pos + 1
    return BlockStore(renewal=int(renewal), blocks=tuple(blocks),
                      discarded_tail=int(arr.size - start))


def resample(blocks: BlockStore, size: int, rng: np.random.Generator) -> np.ndarray:
    """Concatenate uniformly drawn blocks (with replacement), cut to ``size``."""
    if size < 0:
        raise ValueError("resample size must be non-negative")
    if size == 0:
        return np.empty(0, dtype=np.int64)
    if blocks.num_blocks == 0:
        raise ValueError("no blocks to resample from")
    lengths = np.asarray([b.size for b in blocks.blocks], dtype=np.int64)
    mean_len = max(float(lengths.mean()), 1.0)
    chosen: list[int] = []
    total = 0
    while total < size:
        batch = max(8, int((size - total) / mean_len * 1.25) + 4)
        idx = rng.integers(0, blocks.num_blocks, size=batch)
        cum = np.cumsum(lengths[idx])
        take = int(np.searchsorted(cum, size - total, side="left")) + 1
        take = min(take, batch)
        chosen.extend(idx[:take].tolist())
        total += int(cum[take - 1])
    out = np.concatenate([blocks.blocks[i] for i in chosen])[:size]
    return np.ascontiguousarray(out)


@dataclass(frozen=True)
class SmcRule:
    """Decision rule for the shrink test of adjacent champion gains.

    ``rate`` compares a constant fit of the per-size medians against a
    ``log(n)/n`` fit and declares shrinkage when the latter has the smaller
    residual sum of squares.  ``threshold`` instead requires the third
    quartile to be non-increasing and to end below ``epsilon``.
    """

    method: str = "rate"
    strict: bool = False
    epsilon: float = 1e-4

    def __post_init__(self) -> None:
        if self.method not in ("rate", "threshold"):
            raise ValueError("method must be 'rate' or 'threshold'")


@dataclass(frozen=True)
class BootstrapConfig:
    sizes: tuple[int, ...]
    num_resamples: int
    seed: int
    rule: SmcRule = field(default_factory=SmcRule)

    def __post_init__(self) -> None:
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if len(sizes) < 2 or any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("need at least two strictly increasing resample sizes")
        if self.num_resamples < 2:
            raise ValueError("need at least two resamples per size")


@dataclass
class BootstrapReport:
    """Scaled likelihood gains of adjacent champion pairs across resamples.

    ``deltas[p, j, b]`` is the gain of the larger over the smaller tree of
    pair ``p`` on resample ``b`` of size ``sizes[j]``, divided by that size.
    Pairs are indexed from the smallest champion upward.
    """

    sizes: tuple[int, ...]
    pair_leaves: list[tuple[int, int]]
    deltas: np.ndarray
    seed: int

    @property
    def num_pairs(self) -> int:
        return len(self.pair_leaves)

    @property
    def q1(self) -> np.ndarray:
        return np.percentile(self.deltas, 25, axis=2)

    @property
    def median(self) -> np.ndarray:
        return np.percentile(self.deltas, 50, axis=2)

    @property
    def q3(self) -> np.ndarray:
        return np.percentile(self.deltas, 75, axis=2)


def _segment_sums(values: np.ndarray, flat_index: np.ndarray, bounds: np.ndarray) -> np.ndarray:
    if flat_index.size == 0:
        return np.zeros(max(bounds.size - 1, 0))
    return np.add.reduceat(values[flat_index], bounds[:-1])


def _pair_tables(entries: list[ChampionEntry], m: int):
    """Index adjacent champions by the contexts they gain and lose.

    Consecutive champions are nested refinements, so their likelihoods differ
    only on the symmetric difference of their context sets.
    """
    union = sorted({w for e in entries for w in e.tree.contexts}, key=lambda w: (len(w), w))
    position = {w: i for i, w in enumerate(union)}
    by_length: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for length in sorted({len(w) for w in union}):
        ws = [w for w in union if len(w) == length]
        codes = np.asarray([encode_context(w, m) for w in ws], dtype=np.int64)
        slots = np.asarray([position[w] for w in ws], dtype=np.int64)
        by_length[length] = (codes, slots)

    def flatten(groups):
        bounds = np.cumsum([0] + [g.size for g in groups])
        flat = np.concatenate(groups) if groups else np.empty(0, dtype=np.int64)
        return flat, bounds.astype(np.int64)

    gained, lost = [], []
    for small, large in zip(entries, entries[1:]):
        gained.append(np.asarray(
            sorted(position[w] for w in large.tree.contexts - small.tree.contexts),
            dtype=np.int64))
        lost.append(np.asarray(
            sorted(position[w] for w in small.tree.contexts - large.tree.contexts),
            dtype=np.int64))
        # Distinct admissible trees are never subsets of one another.
        if gained[-1].size == 0 or lost[-1].size == 0:
            raise AssertionError("adjacent champions do not differ on both sides")
    return len(union), by_length, flatten(gained), flatten(lost)


def bootstrap_deltas(champions: ChampionSet, blocks: BlockStore,
                     cfg: BootstrapConfig, d: int) -> BootstrapReport:
    """Gains between adjacent champions on fresh resamples of each size.

    Every resample gets its own count table at depth ``d``; a champion
    context missing from a resample simply contributes nothing to that
    tree's likelihood.  The resample stream for cell ``(j, b)`` is seeded
    from ``(seed, j, b)``, so cells are reproducible in any order.
    """
    entries = champions.smallest_first()
    m = champions.alphabet_size
    num_pairs = max(len(entries) - 1, 0)
    pair_leaves = [(entries[i].leaves, entries[i + 1].leaves) for i in range(num_pairs)]
    deltas = np.zeros((num_pairs, len(cfg.sizes), cfg.num_resamples), dtype=np.float64)
    if num_pairs == 0:
        return BootstrapReport(sizes=cfg.sizes, pair_leaves=pair_leaves,
                               deltas=deltas, seed=cfg.seed)

    slot_count, by_length, (gain_flat, gain_bounds), (loss_flat, loss_bounds) = \
        _pair_tables(entries, m)
    terms = np.zeros(slot_count, dtype=np.float64)
    for j, size in enumerate(cfg.sizes):
        if size <= d:
            raise ValueError(f"resample size {size} is not above the depth {d}")
        for b in range(cfg.num_resamples):
            rng = np.random.default_rng([cfg.seed, j, b])
            xs = resample(blocks, size, rng)
            trie = build_count_trie(xs, d, m)
            for length, (codes, slots) in by_length.items():
                counts = trie.next_counts_batch(length, codes)
                terms[slots] = _loglik_rows(counts)
            gain = _segment_sums(terms, gain_flat, gain_bounds)
            loss = _segment_sums(terms, loss_flat, loss_bounds)
            deltas[:, j, b] = (gain - loss) / float(size)
    return BootstrapReport(sizes=cfg.sizes, pair_leaves=pair_leaves,
                           deltas=deltas, seed=cfg.seed)


def _rate_rss(medians: np.ndarray, sizes: np.ndarray) -> tuple[float, float]:
    flat = medians - medians.mean()
    rss_const = float(flat @ flat)
    phi = np.log(sizes) / sizes
    coeff = float(medians @ phi) / float(phi @ phi)
    resid = medians - coeff * phi
    return rss_const, float(resid @ resid)


@dataclass
class SmcSelection:
    """Outcome of the smallest-maximizer scan with its diagnostics."""

    entry: ChampionEntry
    index: int
    shrinks: list[bool]
    rss_const: list[float]
    rss_decay: list[float]
    warning: bool
    rule: SmcRule

    @property
    def tree(self):
        return self.entry.tree


def smc_select(champions: ChampionSet, report: BootstrapReport,
               rule: SmcRule = SmcRule()) -> SmcSelection:
    """Pick the smallest champion whose gain over its successor shrinks.

    Scans the champions from smallest to largest and applies the shrink test
    to each adjacent pair; in strict mode every pair above the selected tree
    must shrink as well, the largest champion shrinking vacuously.  When no
    pair shrinks, the largest champion is returned with a warning flag.
    """
    entries = champions.smallest_first()
    sizes = np.asarray(report.sizes, dtype=np.float64)
    medians = report.median
    q3 = report.q3
    shrinks: list[bool] = []
    rss_const: list[float] = []
    rss_decay: list[float] = []
    for p in range(report.num_pairs):
        rc, rd = _rate_rss(medians[p], sizes)
        rss_const.append(rc)
        rss_decay.append(rd)
        if rule.method == "rate":
            shrinks.append(rd < rc)
        else:
            row = q3[p]
            shrinks.append(bool(np.all(np.diff(row) <= 0) and row[-1] < rule.epsilon))

    if len(entries) == 1:
        return SmcSelection(entry=entries[0], index=0, shrinks=shrinks,
                            rss_const=rss_const, rss_decay=rss_decay,
                            warning=False, rule=rule)

    if rule.strict:
        index = len(entries) - 1
        for i in range(len(entries)):
            if all(shrinks[i:]):
                index = i
                break
        warning = index == len(entries) - 1 and not (shrinks and shrinks[-1])
    else:
        index = next((i for i, s in enumerate(shrinks) if s), None)
        warning = index is None
        if index is None:
            index = len(entries) - 1
    return SmcSelection(entry=entries[index], index=index, shrinks=shrinks,
                        rss_const=rss_const, rss_decay=rss_decay,
                        warning=warning, rule=rule)
