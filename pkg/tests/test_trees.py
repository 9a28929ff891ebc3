import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from smctree import (
    Alphabet,
    ContextTree,
    InvalidTreeError,
    ProbabilisticContextTree,
    SymbolSequence,
    TreeOrder,
    compare_trees,
    context_of,
    is_suffix,
    validate_tree,
)
from smctree.simulation import rhythm_reference_model

from conftest import random_complete_tree, tree


class TestIsSuffix:
    def test_plain_suffix(self):
        assert is_suffix((1, 0), (0, 0, 1, 0))

    def test_not_a_suffix(self):
        assert not is_suffix((1, 0), (0, 1))

    def test_equal_strings_are_suffixes_but_not_proper(self):
        assert is_suffix((0, 1), (0, 1))
        assert not is_suffix((0, 1), (0, 1), proper=True)

    def test_empty_is_suffix_of_everything(self):
        assert is_suffix((), ())
        assert is_suffix((), (1, 2, 3))

    @given(hst.lists(hst.integers(0, 3), max_size=6), hst.lists(hst.integers(0, 3), max_size=6))
    def test_matches_string_semantics(self, s, w):
        expected = len(s) <= len(w) and list(w[len(w) - len(s):]) == list(s)
        assert is_suffix(tuple(s), tuple(w)) == expected


class TestValidateTree:
    def test_suffix_violation(self):
        msg = validate_tree({(0,), (1, 0), (1,)})
        assert msg is not None and "suffix property" in msg

    def test_irreducibility_violation(self):
        msg = validate_tree({(0,), (0, 1)})
        assert msg is not None and "irreducibility" in msg

    def test_valid_tree(self):
        assert validate_tree({(0, 0), (1, 0), (1,)}) is None

    def test_root_only_is_valid(self):
        assert validate_tree({()}) is None

    def test_empty_set_rejected(self):
        assert validate_tree(set()) is not None

    def test_constructor_enforces_validity(self):
        with pytest.raises(InvalidTreeError):
            ContextTree.from_contexts([(0,), (0, 1)])


class TestCompareTrees:
    def test_coarser_is_less(self):
        assert compare_trees(tree((0,), (1,)), tree((0, 0), (1, 0), (1,))) is TreeOrder.LESS

    def test_incomparable(self):
        a = tree((0, 0), (1, 0), (1,))
        b = tree((0,), (0, 1), (1, 1))
        assert compare_trees(a, b) is TreeOrder.INCOMPARABLE

    def test_equal(self):
        a = tree((0,), (1,))
        assert compare_trees(a, tree((1,), (0,))) is TreeOrder.EQUAL

    def test_root_below_everything(self):
        root = ContextTree.root()
        other = tree((0,), (1,))
        assert compare_trees(root, other) is TreeOrder.LESS
        assert compare_trees(other, root) is TreeOrder.GREATER

    @settings(max_examples=60, deadline=None)
    @given(hst.integers(0, 2 ** 32 - 1), hst.integers(2, 3))
    def test_partial_order_on_random_trees(self, seed, m):
        rng = np.random.default_rng(seed)
        a = random_complete_tree(rng, m, 3)
        b = random_complete_tree(rng, m, 3)
        c = random_complete_tree(rng, m, 3)
        assert compare_trees(a, a) is TreeOrder.EQUAL
        ab, ba = compare_trees(a, b), compare_trees(b, a)
        flip = {TreeOrder.LESS: TreeOrder.GREATER, TreeOrder.GREATER: TreeOrder.LESS,
                TreeOrder.EQUAL: TreeOrder.EQUAL,
                TreeOrder.INCOMPARABLE: TreeOrder.INCOMPARABLE}
        assert ba is flip[ab]
        # transitivity on comparable chains
        if compare_trees(a, b) is TreeOrder.LESS and compare_trees(b, c) is TreeOrder.LESS:
            assert compare_trees(a, c) is TreeOrder.LESS


class TestContextOf:
    def test_reference_model_rows(self):
        model = rhythm_reference_model()
        assert context_of(model.tree, (0, 3, 2, 0, 1)) == (2, 0, 1)
        assert context_of(model.tree, (1, 2, 4)) == (4,)

    def test_root_tree_matches_everything(self):
        assert context_of(ContextTree.root(), (4, 2, 1)) == ()

    def test_not_found_when_uncovered(self):
        t = tree((0,), (1,))  # over a 3-letter alphabet, symbol 2 is uncovered
        assert context_of(t, (2,)) is None

    @settings(max_examples=40, deadline=None)
    @given(hst.integers(0, 2 ** 32 - 1))
    def test_unique_matching_suffix(self, seed):
        rng = np.random.default_rng(seed)
        t = random_complete_tree(rng, 2, 4)
        past = tuple(int(v) for v in rng.integers(0, 2, size=t.height + 2))
        hits = [w for w in t.contexts if is_suffix(w, past)]
        assert len(hits) == 1
        assert context_of(t, past) == hits[0]


class TestAlphabetAndSequence:
    def test_alphabet_rejects_duplicates(self):
        with pytest.raises(ValueError):
            Alphabet(("a", "a"))

    def test_alphabet_rejects_empty_token(self):
        with pytest.raises(ValueError):
            Alphabet(("a", ""))

    def test_encode_decode_roundtrip(self):
        alpha = Alphabet(("x", "y", "z"))
        arr = alpha.encode(["z", "x", "y"])
        assert arr.tolist() == [2, 0, 1]
        assert alpha.decode(arr) == ["z", "x", "y"]

    def test_sequence_bounds_checked(self):
        alpha = Alphabet(("0", "1"))
        with pytest.raises(ValueError):
            SymbolSequence(data=np.array([0, 2]), alphabet=alpha)

    def test_sequence_is_immutable(self):
        alpha = Alphabet(("0", "1"))
        seq = SymbolSequence(data=np.array([0, 1]), alphabet=alpha)
        with pytest.raises(ValueError):
            seq.data[0] = 1


class TestProbabilisticContextTree:
    def test_requires_row_per_context(self):
        t = tree((0,), (1,))
        with pytest.raises(ValueError):
            ProbabilisticContextTree(tree=t, probs={(0,): (0.5, 0.5)})

    def test_rows_must_sum_to_one(self):
        t = tree((0,), (1,))
        with pytest.raises(ValueError):
            ProbabilisticContextTree(tree=t, probs={(0,): (0.6, 0.5), (1,): (0.5, 0.5)})

    def test_rows_must_be_nonnegative(self):
        t = tree((0,), (1,))
        with pytest.raises(ValueError):
            ProbabilisticContextTree(tree=t, probs={(0,): (1.5, -0.5), (1,): (0.5, 0.5)})

    def test_valid_model(self):
        t = tree((0,), (1,))
        pct = ProbabilisticContextTree(tree=t, probs={(0,): (0.0, 1.0), (1,): (1.0, 0.0)})
        assert pct.num_symbols == 2
        assert pct.row((0,)) == (0.0, 1.0)
