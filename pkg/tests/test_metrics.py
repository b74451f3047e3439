from collections import Counter

import numpy as np
import pytest

import treegen
from conparse.errors import LengthMismatch
from conparse.metrics import (
    EvalParams,
    evaluate_trees,
    labeled_brackets,
    prf,
    unlabeled_f1,
    unlabeled_spans,
)
from conparse.trees import (
    binarize,
    collapse_unary,
    default_head_table,
    parse_bracketed,
)


def parse_one(text, **kw):
    return parse_bracketed(text, **kw)[0]


class TestLabeledBrackets:
    def test_simple_enumeration(self):
        t = parse_one("(S (NP (DT a) (NN b)))")
        got = labeled_brackets(t)
        assert got == Counter({("S", 0, 1): 1, ("NP", 0, 1): 1})

    def test_pos_leaves_contribute_nothing(self):
        t = parse_one("(S (DT a) (NN b))")
        assert labeled_brackets(t) == Counter({("S", 0, 1): 1})

    def test_unary_spine_one_bracket_per_level(self):
        t = parse_one("(S (VP (VBG falling)))")
        got = labeled_brackets(t)
        assert got == Counter({("S", 0, 0): 1, ("VP", 0, 0): 1})

    def test_punctuation_deletion_reindexes(self):
        t = parse_one("(S (NP (NN a)) (, ,) (VP (VB go) (NN home)))")
        got = labeled_brackets(t)
        # after deleting the comma: a=0, go=1, home=2
        assert got == Counter({("S", 0, 2): 1, ("NP", 0, 0): 1, ("VP", 1, 2): 1})

    def test_node_over_only_deleted_tokens_vanishes(self):
        t = parse_one("(S (NP (NN a)) (PUNC (, ,) (. .)))")
        got = labeled_brackets(t)
        assert ("PUNC", 1, 1) not in got
        assert got[("S", 0, 0)] == 1

    def test_strict_mode_keeps_everything(self):
        t = parse_one("(S (NP (NN a)) (, ,))")
        got = labeled_brackets(t, EvalParams.strict())
        assert got == Counter({("S", 0, 1): 1, ("NP", 0, 0): 1})

    def test_top_root_excluded(self):
        t = parse_one("(TOP (S (NN a) (NN b)))", strip_top=False)
        got = labeled_brackets(t)
        assert got == Counter({("S", 0, 1): 1})

    def test_multiset_semantics(self):
        t = parse_one("(NP (NP (NN a) (NN b)))")  # unary NP over NP
        got = labeled_brackets(t)
        assert got[("NP", 0, 1)] == 2


class TestPrf:
    def test_identical(self):
        c = Counter({("S", 0, 1): 1})
        assert prf(c, c) == (1.0, 1.0, 1.0)

    def test_disjoint(self):
        a = Counter({("S", 0, 1): 1})
        b = Counter({("NP", 0, 1): 1})
        assert prf(a, b) == (0.0, 0.0, 0.0)

    def test_hand_arithmetic(self):
        gold = Counter({("A", 0, 1): 1, ("B", 0, 2): 1, ("C", 1, 2): 1, ("D", 0, 3): 1})
        pred = Counter(
            {("A", 0, 1): 1, ("B", 0, 2): 1, ("C", 1, 2): 1, ("Y", 0, 3): 1, ("Z", 2, 3): 1}
        )
        p, r, f = prf(gold, pred)
        assert p == pytest.approx(3 / 5)
        assert r == pytest.approx(3 / 4)
        assert f == pytest.approx(2 * (3 / 5) * (3 / 4) / ((3 / 5) + (3 / 4)))

    def test_swap_symmetry(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            gold = Counter({("A", 0, int(rng.integers(1, 5))): 1 for _ in range(3)})
            pred = Counter({("A", 0, int(rng.integers(1, 5))): 1 for _ in range(3)})
            p1, r1, f1 = prf(gold, pred)
            p2, r2, f2 = prf(pred, gold)
            assert (p1, r1, f1) == (r2, p2, f2)

    def test_empty_denominators(self):
        assert prf(Counter(), Counter({("S", 0, 0): 1})) == (0.0, 0.0, 0.0)
        assert prf(Counter({("S", 0, 0): 1}), Counter()) == (0.0, 0.0, 0.0)


class TestUnlabeledF1:
    def binarized(self, text):
        return binarize(collapse_unary(parse_one(text)), default_head_table())

    def test_identical_trees(self):
        b = self.binarized("(S (NP (DT a) (NN b)) (VP (VBZ c) (NN d)))")
        uf, flag = unlabeled_f1(b, b)
        assert uf == 1.0 and not flag

    def test_n3_single_eligible_span(self):
        left = self.binarized("(S (NP (NN a) (NN b)) (NN c))")
        right = self.binarized("(S (NN a) (NP (NN b) (NN c)))")
        assert unlabeled_spans(left) == Counter({(0, 1): 1})
        assert unlabeled_spans(right) == Counter({(1, 2): 1})
        assert unlabeled_f1(left, left)[0] == 1.0
        assert unlabeled_f1(left, right)[0] == 0.0

    def test_n2_degenerate_flagged(self):
        b = self.binarized("(S (NN a) (NN b))")
        uf, flag = unlabeled_f1(b, b)
        assert uf == 1.0 and flag

    def test_length_mismatch(self):
        a = self.binarized("(S (NN a) (NN b))")
        b = self.binarized("(S (NN a) (NN b) (NN c))")
        with pytest.raises(LengthMismatch):
            unlabeled_f1(a, b)

    def test_whole_sentence_span_excluded(self):
        b = self.binarized("(S (NP (NN a) (NN b)) (VP (VBZ c) (NN d)))")
        spans = unlabeled_spans(b)
        assert (0, 3) not in spans


GOLDEN_GOLD = """
(S (NP (DT a) (NN b)) (VP (VBZ c)))
(S (NP (NN x)))
(S (VP (VB go) (NP (NN home))) (. .))
"""
GOLDEN_PRED = """
(S (NP (DT a) (NN b) (VBZ c)))
(S (NP (NN x)))
(S (VP (VB go)) (NP (NN home)) (. .))
"""


class TestGoldenFixture:
    # hand-computed: gold brackets 3+2+3=8, predicted 2+2+3=7, matched 1+2+2=5
    def test_hand_computed_scores(self):
        golds = parse_bracketed(GOLDEN_GOLD)
        preds = parse_bracketed(GOLDEN_PRED)
        rep = evaluate_trees(golds, preds)
        assert rep.n_gold == 8 and rep.n_pred == 7 and rep.match == 5
        assert round(100 * rep.lp, 2) == 71.43
        assert round(100 * rep.lr, 2) == 62.50
        assert round(100 * rep.lf, 2) == 66.67
        assert rep.exact == 1

    def test_gold_vs_itself_is_perfect(self):
        golds = parse_bracketed(GOLDEN_GOLD)
        rep = evaluate_trees(golds, golds)
        assert rep.lf == 1.0 and rep.exact_rate == 1.0


class TestRoundTripInvariant:
    def test_brackets_preserved_by_binarize_cycle(self, heads):
        from conparse.trees import debinarize

        for seed in range(40):
            rng = np.random.default_rng(seed)
            t = treegen.random_tree(rng, int(rng.integers(2, 9)))
            try:
                c = collapse_unary(t)
            except Exception:
                continue
            t2 = debinarize(binarize(c, heads))
            assert labeled_brackets(t) == labeled_brackets(t2)
