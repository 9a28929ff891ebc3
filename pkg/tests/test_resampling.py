import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from smctree import (
    BootstrapConfig,
    BootstrapReport,
    ChampionEntry,
    ChampionSet,
    ContextTree,
    DofMode,
    FullRule,
    InsufficientRenewalPointsError,
    SmcRule,
    bootstrap_deltas,
    build_count_trie,
    champion_set,
    resample,
    smc_select,
    split_renewal_blocks,
)

from conftest import tree


class TestSplitRenewalBlocks:
    def test_basic_split(self):
        store = split_renewal_blocks(np.array([2, 1, 4, 3, 0, 4, 2, 4]), renewal=4)
        assert [b.tolist() for b in store.blocks] == [[2, 1, 4], [3, 0, 4], [2, 4]]
        assert store.discarded_tail == 0

    def test_trailing_segment_dropped(self):
        store = split_renewal_blocks(np.array([2, 1, 4, 2]), renewal=4)
        assert [b.tolist() for b in store.blocks] == [[2, 1, 4]]
        assert store.discarded_tail == 1

    def test_missing_renewal_symbol(self):
        with pytest.raises(InsufficientRenewalPointsError, match="insufficient renewal"):
            split_renewal_blocks(np.array([2, 1, 4, 2]), renewal=3)

    @settings(max_examples=50, deadline=None)
    @given(hst.lists(hst.integers(0, 3), min_size=8, max_size=60))
    def test_reassembly(self, values):
        x = np.asarray(values)
        if int((x == 3).sum()) < 2:
            return
        store = split_renewal_blocks(x, renewal=3)
        rebuilt = np.concatenate(store.blocks)
        assert rebuilt.size + store.discarded_tail == x.size
        assert np.array_equal(rebuilt, x[: rebuilt.size])
        for b in store.blocks:
            assert b[-1] == 3
            assert not (b[:-1] == 3).any()


class TestResample:
    def test_single_block_repeats(self):
        single = split_renewal_blocks(np.array([2, 1, 4, 0]), renewal=4)
        assert single.num_blocks == 1 and single.discarded_tail == 1
        out = resample(single, 7, np.random.default_rng(0))
        assert out.tolist() == [2, 1, 4, 2, 1, 4, 2]

    def test_zero_length(self):
        store = split_renewal_blocks(np.array([0, 4, 1, 4]), renewal=4)
        assert resample(store, 0, np.random.default_rng(0)).size == 0

    def test_deterministic_given_stream(self):
        store = split_renewal_blocks(np.array([0, 4, 1, 4, 2, 2, 4, 3, 4]), renewal=4)
        a = resample(store, 50, np.random.default_rng([1, 2]))
        b = resample(store, 50, np.random.default_rng([1, 2]))
        assert np.array_equal(a, b)

    def test_blocks_drawn_uniformly(self):
        store = split_renewal_blocks(np.array([0, 0, 4, 1, 1, 4]), renewal=4)
        assert store.num_blocks == 2
        rng = np.random.default_rng(42)
        first = [resample(store, 3, rng)[0] for _ in range(10_000)]
        share = np.mean([v == 0 for v in first])
        assert abs(share - 0.5) < 0.05


def _fake_champions(entries_spec):
    """ChampionSet with given (tree, loglik, df) triples, largest first."""
    entries = []
    total = len(entries_spec)
    for i, (t, ll, df) in enumerate(entries_spec):
        entries.append(ChampionEntry(tree=t, loglik=ll, df=df, leaves=len(t),
                                     c_lo=0.0 if i == 0 else float(i),
                                     c_hi=float(i + 1) if i + 1 < total else math.inf))
    return ChampionSet(entries=entries, n=1000, d=3, alphabet_size=2,
                       rule_description="full", dof_mode=DofMode.ALLOWED)


def _report_from_medians(pair_medians, sizes, pair_leaves):
    pair_medians = np.asarray(pair_medians, dtype=np.float64)
    deltas = np.repeat(pair_medians[:, :, None], 4, axis=2)
    return BootstrapReport(sizes=tuple(sizes), pair_leaves=pair_leaves,
                           deltas=deltas, seed=0)


class TestQuartiles:
    def test_linear_interpolation_convention(self):
        deltas = np.array([[[1.0, 2.0, 3.0, 4.0]]]) / 100.0
        report = BootstrapReport(sizes=(100,), pair_leaves=[(1, 2)], deltas=deltas, seed=0)
        assert abs(report.q1[0, 0] - 1.75 / 100.0) < 1e-15
        assert abs(report.median[0, 0] - 2.5 / 100.0) < 1e-15
        assert abs(report.q3[0, 0] - 3.25 / 100.0) < 1e-15

    def test_quartile_ordering(self):
        rng = np.random.default_rng(0)
        deltas = rng.normal(size=(3, 2, 25))
        report = BootstrapReport(sizes=(10, 20), pair_leaves=[(1, 2), (2, 3), (3, 4)],
                                 deltas=deltas, seed=0)
        assert (report.q1 <= report.median).all()
        assert (report.median <= report.q3).all()


class TestSmcSelect:
    def _three_champions(self):
        t_root = ContextTree.root()
        t_mid = tree((0,), (1,))
        t_big = tree((0, 0), (1, 0), (1,))
        return _fake_champions([(t_big, -10.0, 6), (t_mid, -20.0, 4), (t_root, -50.0, 2)])

    def test_selects_tree_whose_gain_decays(self):
        champs = self._three_champions()
        sizes = (10_000, 40_000, 70_000)
        report = _report_from_medians(
            [[0.010, 0.010, 0.010], [9e-4, 3e-4, 1e-4]], sizes,
            pair_leaves=[(1, 2), (2, 3)])
        sel = smc_select(champs, report)
        assert sel.index == 1
        assert sel.tree == tree((0,), (1,))
        assert sel.shrinks == [False, True]
        assert not sel.warning

    def test_single_champion_returns_root(self):
        champs = _fake_champions([(ContextTree.root(), -5.0, 1)])
        report = BootstrapReport(sizes=(10, 20), pair_leaves=[],
                                 deltas=np.zeros((0, 2, 4)), seed=0)
        sel = smc_select(champs, report)
        assert sel.tree.is_root_only and not sel.warning

    def test_no_shrink_returns_largest_with_warning(self):
        champs = self._three_champions()
        sizes = (10_000, 40_000, 70_000)
        report = _report_from_medians(
            [[0.010, 0.011, 0.010], [0.02, 0.02, 0.02]], sizes,
            pair_leaves=[(1, 2), (2, 3)])
        sel = smc_select(champs, report)
        assert sel.index == 2
        assert sel.warning

    def test_strict_mode_requires_all_pairs_above(self):
        champs = self._three_champions()
        sizes = (10_000, 40_000, 70_000)
        phi = [math.log(s) / s for s in sizes]
        decaying = [3.0 * v for v in phi]
        report = _report_from_medians(
            [decaying, [0.02, 0.02, 0.02]], sizes, pair_leaves=[(1, 2), (2, 3)])
        loose = smc_select(champs, report)
        assert loose.index == 0
        strict = smc_select(champs, report, SmcRule(strict=True))
        assert strict.index == 2

    def test_threshold_method(self):
        champs = self._three_champions()
        sizes = (10_000, 40_000, 70_000)
        report = _report_from_medians(
            [[0.010, 0.010, 0.010], [9e-4, 3e-4, 1e-5]], sizes,
            pair_leaves=[(1, 2), (2, 3)])
        sel = smc_select(champs, report, SmcRule(method="threshold", epsilon=1e-4))
        assert sel.index == 1

    def test_identical_trees_guard(self):
        champs = self._three_champions()
        report = _report_from_medians([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
                                      (10, 20, 30), pair_leaves=[(1, 2), (2, 3)])
        sel = smc_select(champs, report)
        # all-zero medians fit both models equally; nothing shrinks strictly
        assert sel.warning


class TestBootstrapDeltas:
    def _pipeline(self, seed=0, n=4000):
        rng = np.random.default_rng(seed)
        x = np.where(rng.random(n) < 0.2, 1, rng.integers(0, 2, size=n) * 2)
        trie = build_count_trie(x, 3, alphabet_size=3)
        champs = champion_set(trie, FullRule(), DofMode.ALLOWED)
        blocks = split_renewal_blocks(x, renewal=1)
        cfg = BootstrapConfig(sizes=(400, 900), num_resamples=8, seed=7)
        return champs, blocks, cfg

    def test_report_shape_and_reproducibility(self):
        champs, blocks, cfg = self._pipeline()
        rep1 = bootstrap_deltas(champs, blocks, cfg, 3)
        rep2 = bootstrap_deltas(champs, blocks, cfg, 3)
        assert rep1.deltas.shape == (len(champs) - 1, 2, 8)
        assert np.array_equal(rep1.deltas, rep2.deltas)
        assert np.isfinite(rep1.deltas).all()

    def test_gains_match_direct_likelihood_difference(self):
        from smctree.estimation import log_likelihood

        champs, blocks, cfg = self._pipeline()
        rep = bootstrap_deltas(champs, blocks, cfg, 3)
        entries = champs.smallest_first()
        j, b = 1, 3
        xs = resample(blocks, cfg.sizes[j], np.random.default_rng([cfg.seed, j, b]))
        trie = build_count_trie(xs, 3, alphabet_size=3)

        def safe_ll(t):
            total = 0.0
            for w in t:
                counts = trie.next_counts(w)
                s = counts.sum()
                if s:
                    pos = counts[counts > 0]
                    total += float((pos * np.log(pos)).sum() - s * math.log(s))
            return total

        for p in range(rep.num_pairs):
            direct = (safe_ll(entries[p + 1].tree) - safe_ll(entries[p].tree)) / cfg.sizes[j]
            assert abs(direct - rep.deltas[p, j, b]) < 1e-9

    def test_size_must_exceed_depth(self):
        champs, blocks, _ = self._pipeline()
        cfg = BootstrapConfig(sizes=(2, 5), num_resamples=2, seed=0)
        with pytest.raises(ValueError, match="not above the depth"):
            bootstrap_deltas(champs, blocks, cfg, 3)


class TestBootstrapConfig:
    def test_sizes_must_increase(self):
        with pytest.raises(ValueError):
            BootstrapConfig(sizes=(100, 100), num_resamples=4, seed=0)

    def test_minimum_resamples(self):
        with pytest.raises(ValueError):
            BootstrapConfig(sizes=(10, 20), num_resamples=1, seed=0)
