import numpy as np
import pytest

from conparse.errors import EmptyCorpus, UnknownPOS
from conparse.trees import collapse_unary, parse_bracketed
from conparse.vocab import (
    BOS,
    EOS,
    STOP_LABEL,
    UNK,
    Vocab,
    build_vocab,
    replace_probability,
    stochastic_unk,
    unk_class,
)


def vocab_from(text, **kw):
    return build_vocab([collapse_unary(t) for t in parse_bracketed(text)], **kw)


class TestBuildVocab:
    def test_single_tree(self):
        v = vocab_from("(S (NN x))")
        assert "x" in v.words
        assert v.labels[0] == STOP_LABEL
        assert set(v.labels) == {STOP_LABEL, "S"}  # POS tag NN is not a label
        assert "NN" in v.pos
        assert BOS in v.words and EOS in v.words and UNK in v.words

    def test_frequency_aggregated(self):
        v = vocab_from("(S (NN x) (NN y))\n(S (NN x) (NN z))")
        assert v.freq["x"] == 2 and v.freq["y"] == 1

    def test_min_count_hapax_resolves_to_class(self):
        v = vocab_from("(S (NN hapax) (NN common) (NN common))", min_count=2)
        assert v.exact_word_id("hapax") is None
        wid = v.word_id("hapax")
        assert v.words[wid].startswith("<unk")
        assert v.exact_word_id("common") is not None

    def test_intermediate_labels_registered(self):
        v = vocab_from("(NP (DT a) (NN b) (NN c))")
        assert v.has_label("NP*")

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            build_vocab([])

    def test_unknown_pos_raises(self):
        v = vocab_from("(S (NN x))")
        with pytest.raises(UnknownPOS):
            v.pos_id("ZZZ")

    def test_root_label_most_frequent(self):
        v = vocab_from("(S (NN a))\n(S (NN b))\n(FRAG (NN c))")
        assert v.root_label == "S"

    def test_round_trip_dict(self):
        v = vocab_from("(S (NP (DT a) (NN b)) (VP (VBZ c)))")
        w = Vocab.from_dict(v.to_dict())
        assert w.words == v.words and w.labels == v.labels
        assert w.word_id("b") == v.word_id("b")


class TestUnkClass:
    # golden table freezing the class alphabet
    GOLDEN = [
        ("falling", False, "<unk-lc-ng>"),
        ("Falling", False, "<unk-ic-ng>"),
        ("Falling", True, "<unk-sc-ng>"),
        ("IBM", False, "<unk-ac-bm>"),
        ("IBM", True, "<unk-ac-bm>"),
        ("1990s", False, "<unk-lc-d>"),
        ("12", False, "<unk-lc-d>"),
        ("3.14", False, "<unk-lc-d>"),
        ("one-time", False, "<unk-lc-h-me>"),
        ("U-2", False, "<unk-ac-d-h>"),
        ("x", False, "<unk-lc>"),
        ("X", False, "<unk-ic>"),
        ("go", False, "<unk-lc-go>"),
        ("Go", True, "<unk-sc-go>"),
        ("€50", False, "<unk-lc-d>"),
        ("re-엔진", False, "<unk-lc-h-엔진>"),
        ("DOG", False, "<unk-ac-og>"),
        ("McDonald", False, "<unk-ic-ld>"),
        ("don't", False, "<unk-lc>"),
        ("mid-1990", False, "<unk-lc-d-h>"),
    ]

    @pytest.mark.parametrize("word,initial,expected", GOLDEN)
    def test_golden_classes(self, word, initial, expected):
        assert unk_class(word, initial) == expected

    def test_chinese_single_class(self):
        for w in ["猫", "Falling", "1990s"]:
            assert unk_class(w, mode="chinese") == UNK


class TestStochasticUnk:
    def test_formula_values(self):
        assert replace_probability(1, 0.8375) == pytest.approx(0.8375 / 1.8375)
        assert replace_probability(0, 0.8375) == 1.0
        # frequency -> infinity drives the probability to zero
        assert replace_probability(10**9, 0.8375) < 1e-8

    def test_monte_carlo_matches_closed_form(self):
        v = vocab_from("(S (NN w) (NN w) (NN w) (NN q))")
        assert v.freq["w"] == 3
        rng = np.random.default_rng(7)
        gamma = 0.8375
        hits = 0
        trials = 10000
        for _ in range(trials):
            out = stochastic_unk(["q", "w"], v, gamma, rng)
            if out[1] != "w":
                hits += 1
        assert abs(hits / trials - gamma / (gamma + 3)) < 0.02

    def test_seed_reproducible(self):
        v = vocab_from("(S (NN a) (NN b) (NN c))")
        toks = ["a", "b", "c"] * 10
        out1 = stochastic_unk(toks, v, 0.8375, np.random.default_rng(42))
        out2 = stochastic_unk(toks, v, 0.8375, np.random.default_rng(42))
        assert out1 == out2

    def test_gamma_must_be_positive(self):
        v = vocab_from("(S (NN a))")
        with pytest.raises(ValueError):
            stochastic_unk(["a"], v, 0.0, np.random.default_rng(0))

    def test_eval_lookup_never_replaces_known(self):
        v = vocab_from("(S (NN known))")
        assert v.words[v.word_id("known")] == "known"
        oov = v.word_id("zzzunseen")
        assert v.words[oov].startswith("<unk")

    def test_chinese_mode_singletons_only(self):
        trees = "(S (NN once) (NN twice) (NN twice))"
        v = vocab_from(trees, mode="chinese")
        rng = np.random.default_rng(3)
        n_once = 0
        n_twice = 0
        for _ in range(4000):
            out = stochastic_unk(["once", "twice"], v, 1.0, rng)
            n_once += out[0] == UNK
            n_twice += out[1] == UNK
        assert n_twice == 0
        assert abs(n_once / 4000 - 0.5) < 0.03
