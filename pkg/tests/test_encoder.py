import numpy as np
import pytest

import conparse.tensor as T
from conparse.config import ModelConfig
from conparse.encoder import span_sr, span_v, tokens_for_sentence
from conparse.errors import EmptySentence, IndexOutOfRange, UnknownPOS
from conparse.nn import lstm_step
from conparse.parser import ParserModel
from conparse.tensor import Tensor, grad_check
from conparse.trees import collapse_unary, parse_bracketed
from conparse.vocab import build_vocab
from conftest import tiny_model_config

CORPUS = """
(S (NP (DT the) (NN dog)) (VP (VBZ sees) (NP (DT a) (NN cat))))
(S (NP (NNS birds)) (VP (VBP fly) (ADVP (RB high))))
(S (VP (VBG falling)))
"""


@pytest.fixture(scope="module")
def vocab():
    return build_vocab([collapse_unary(t) for t in parse_bracketed(CORPUS)])


def make_model(vocab, dtype=np.float64, **kw):
    return ParserModel(tiny_model_config(**kw), vocab, seed=11, dtype=dtype)


def encode_words(model, words, tags):
    tokens = tokens_for_sentence(words, tags, model.vocab)
    return model.encoder.encode(tokens)


class TestDims:
    def test_default_dimensions(self, vocab):
        cfg = ModelConfig()
        assert cfg.input_dim == 132  # 100 word + 32 POS
        model = ParserModel(cfg, vocab, seed=0)
        enc = encode_words(model, ["the", "dog"], ["DT", "NN"])
        assert enc.f(1).shape == (200,)
        assert enc.r(0).shape == (200,)
        assert span_v(enc, 0, 1).shape == (800,)
        assert span_sr(enc, 0, 1).shape == (1200,)

    def test_x_input_dimension(self, vocab):
        model = make_model(vocab)
        enc = encode_words(model, ["the"], ["DT"])
        assert enc.x_inputs[0].shape == (model.cfg.input_dim,)

    def test_char_summary_added_not_concatenated(self, vocab):
        # zero parameters everywhere -> x_input is exactly zero
        model = make_model(vocab)
        for _, p in model.params.items():
            p.data[...] = 0.0
        enc = encode_words(model, ["the", "dog"], ["DT", "NN"])
        for x in enc.x_inputs:
            np.testing.assert_array_equal(x.data, 0.0)


class TestEncode:
    def test_empty_sentence(self, vocab):
        model = make_model(vocab)
        with pytest.raises(EmptySentence):
            model.encoder.encode([])

    def test_unknown_pos(self, vocab):
        with pytest.raises(UnknownPOS):
            tokens_for_sentence(["the"], ["XYZ"], vocab)

    def test_single_word_sentence(self, vocab):
        model = make_model(vocab)
        enc = encode_words(model, ["falling"], ["VBG"])
        assert enc.n == 1
        v = span_v(enc, 0, 0)
        assert v.shape == (4 * model.cfg.hidden,)

    def test_deterministic(self, vocab):
        model = make_model(vocab)
        e1 = encode_words(model, ["the", "dog"], ["DT", "NN"])
        e2 = encode_words(model, ["the", "dog"], ["DT", "NN"])
        for a, b in zip(e1.fwd, e2.fwd):
            np.testing.assert_array_equal(a.data, b.data)

    def test_independent_of_other_sentences(self, vocab):
        model = make_model(vocab)
        before = encode_words(model, ["the", "dog"], ["DT", "NN"])
        encode_words(model, ["a", "cat"], ["DT", "NN"])
        after = encode_words(model, ["the", "dog"], ["DT", "NN"])
        for a, b in zip(before.bwd, after.bwd):
            np.testing.assert_array_equal(a.data, b.data)

    def test_boundary_states_exist(self, vocab):
        model = make_model(vocab)
        enc = encode_words(model, ["the", "dog"], ["DT", "NN"])
        # f_0 is the <s> state, r_n the </s> state; both are defined
        assert enc.f(0).shape == (model.cfg.hidden,)
        assert enc.r(enc.n).shape == (model.cfg.hidden,)
        assert not np.array_equal(enc.f(0).data, enc.f(1).data)


class TestCharLSTMUnrolled:
    def test_single_char_word_matches_manual_unroll(self, vocab):
        model = make_model(vocab)  # float64
        ps = model.params
        tok = tokens_for_sentence(["a"], ["DT"], vocab)[0]
        assert len(tok.char_ids) == 1
        x_input = model.encoder.embed_token(tok).data

        def unroll(prefix, x):
            wx, wh, b = ps[f"{prefix}.Wx"].data, ps[f"{prefix}.Wh"].data, ps[f"{prefix}.b"].data
            hdim = wh.shape[1]
            z = wx @ x + wh @ np.zeros(hdim) + b
            sig = lambda v: 1.0 / (1.0 + np.exp(-v))
            i, f, g, o = sig(z[:hdim]), sig(z[hdim:2*hdim]), np.tanh(z[2*hdim:3*hdim]), sig(z[3*hdim:])
            c = f * np.zeros(hdim) + i * g
            return o * np.tanh(c)

        ce = ps["enc.E_char"].data[tok.char_ids[0]]
        h_f = unroll("enc.char_fwd", ce)
        h_r = unroll("enc.char_bwd", ce)
        x_char = np.tanh(
            ps["enc.W_char_l"].data @ h_f + ps["enc.W_char_r"].data @ h_r + ps["enc.b_char"].data
        )
        want = np.concatenate(
            [ps["enc.E_word"].data[tok.word_id] + x_char, ps["enc.E_pos"].data[tok.pos_id]]
        )
        np.testing.assert_allclose(x_input, want, rtol=1e-12, atol=1e-12)


class TestSpanRepresentations:
    def test_index_out_of_range(self, vocab):
        model = make_model(vocab)
        enc = encode_words(model, ["the", "dog"], ["DT", "NN"])
        for i, j in [(-1, 0), (0, 2), (1, 0)]:
            with pytest.raises(IndexOutOfRange):
                span_v(enc, i, j)
            with pytest.raises(IndexOutOfRange):
                span_sr(enc, i, j)

    def test_span_v_composition(self, vocab):
        model = make_model(vocab)
        enc = encode_words(model, ["the", "dog", "sees"], ["DT", "NN", "VBZ"])
        v = span_v(enc, 0, 1).data
        h = model.cfg.hidden
        np.testing.assert_array_equal(v[:h], enc.f(1).data)
        np.testing.assert_array_equal(v[h:2*h], enc.r(0).data)
        np.testing.assert_array_equal(v[2*h:3*h], enc.f(2).data)
        np.testing.assert_array_equal(v[3*h:], enc.r(1).data)

    def test_full_sentence_span_uses_boundaries(self, vocab):
        model = make_model(vocab)
        enc = encode_words(model, ["the", "dog", "sees"], ["DT", "NN", "VBZ"])
        v = span_v(enc, 0, enc.n - 1).data
        h = model.cfg.hidden
        np.testing.assert_array_equal(v[2*h:3*h], enc.f(enc.n).data)
        np.testing.assert_array_equal(v[h:2*h], enc.r(0).data)

    def test_sr_difference_structure(self, vocab):
        model = make_model(vocab)
        enc = encode_words(model, ["the", "dog", "sees"], ["DT", "NN", "VBZ"])
        h = model.cfg.hidden
        sr = span_sr(enc, 1, 1).data
        left = sr[: 2 * h]
        mid = sr[2 * h : 4 * h]
        np.testing.assert_array_equal(left[:h], enc.f(1).data - enc.f(0).data)
        np.testing.assert_array_equal(mid[:h], enc.f(2).data - enc.f(1).data)
        np.testing.assert_array_equal(mid[h:], enc.r(1).data - enc.r(2).data)

    def test_full_span_context_blocks_zero(self, vocab):
        model = make_model(vocab)
        enc = encode_words(model, ["the", "dog", "sees"], ["DT", "NN", "VBZ"])
        h = model.cfg.hidden
        sr = span_sr(enc, 0, enc.n - 1).data
        np.testing.assert_array_equal(sr[: 2 * h], 0.0)
        np.testing.assert_array_equal(sr[4 * h :], 0.0)
        assert np.any(sr[2 * h : 4 * h] != 0.0)

    def test_encoder_gradients_match_fd(self, vocab):
        model = make_model(vocab)
        tokens = tokens_for_sentence(["the", "dog", "sees"], ["DT", "NN", "VBZ"], vocab)
        probe = Tensor(np.random.default_rng(5).normal(size=4 * model.cfg.hidden))

        def f():
            enc = model.encoder.encode(tokens)
            return T.dot(probe, T.tanh(span_v(enc, 0, 2)))

        params = [(n, p) for n, p in model.params.items() if n.startswith("enc.")]
        err = grad_check(f, params, max_coords=4, rng=np.random.default_rng(0))
        assert err < 1e-4
