"""Sentence encoder: input embeddings, stacked BiLSTM, span representations.

The forward LSTM runs over <s> + sentence and the backward one over
sentence + </s>, so with states indexed f_1..f_n and r_0..r_{n-1} for the
words, f_0 and r_n are the boundary-symbol states. Internally every layer
is run over the full padded sequence (both boundaries) so that stacking is
well defined at every position.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import tensor as T
from .config import ModelConfig
from .errors import EmptySentence, IndexOutOfRange
from .nn import LSTMParams, ParamSet, lstm_params, maybe_dropout, run_lstm
from .tensor import Tensor
from .vocab import BOS, EOS, Vocab


@dataclass(frozen=True)
class Token:
    """Vocabulary-resolved view of one input token.

    char_ids always come from the original surface form, even when word_id
    points at an unknown-word class.
    """

    word_id: int
    char_ids: tuple[int, ...]
    pos_id: int


def tokens_for_sentence(
    words: Sequence[str],
    tags: Sequence[str],
    vocab: Vocab,
    word_forms: Optional[Sequence[str]] = None,
) -> list[Token]:
    """Resolve a tagged sentence against the vocabulary.

    word_forms, when given, supplies the (possibly unk-replaced) forms used
    for the word-embedding lookup; characters stay those of `words`.
    """
    if len(words) != len(tags):
        raise ValueError("words and tags must align")
    forms = words if word_forms is None else word_forms
    out = []
    for t, (w, form, tag) in enumerate(zip(words, forms, tags)):
        out.append(
            Token(
                word_id=vocab.word_id(form, sentence_initial=(t == 0)),
                char_ids=tuple(vocab.char_ids(w)),
                pos_id=vocab.pos_id(tag),
            )
        )
    return out


@dataclass
class Encoded:
    """Final-layer BiLSTM states over the padded sentence.

    fwd/bwd have length n + 2 and are indexed by padded position
    (0 = <s>, t + 1 = word t, n + 1 = </s>).
    """

    fwd: list[Tensor]
    bwd: list[Tensor]
    x_inputs: list[Tensor]
    n: int

    def f(self, i: int) -> Tensor:
        # f_i: forward state at word i-1; f_0 is the <s> state
        return self.fwd[i]

    def r(self, i: int) -> Tensor:
        # r_i: backward state at word i; r_n is the </s> state
        return self.bwd[i + 1]


class Encoder:
    """Embeds tokens and runs the stacked bidirectional word LSTM."""

    def __init__(self, ps: ParamSet, cfg: ModelConfig, vocab: Vocab, rng: np.random.Generator):
        self.cfg = cfg
        self.vocab = vocab
        self.e_word = ps.embedding("enc.E_word", vocab.n_words, cfg.word_dim, rng)
        self.e_char = ps.embedding("enc.E_char", vocab.n_chars, cfg.char_dim, rng)
        self.e_pos = ps.embedding("enc.E_pos", vocab.n_pos, cfg.pos_dim, rng)
        self.char_fwd = lstm_params(ps, "enc.char_fwd", cfg.char_dim, cfg.char_hidden, rng)
        self.char_bwd = lstm_params(ps, "enc.char_bwd", cfg.char_dim, cfg.char_hidden, rng)
        self.w_char_l = ps.matrix("enc.W_char_l", cfg.word_dim, cfg.char_hidden, rng)
        self.w_char_r = ps.matrix("enc.W_char_r", cfg.word_dim, cfg.char_hidden, rng)
        self.b_char = ps.bias("enc.b_char", cfg.word_dim)
        self.layers: list[tuple[LSTMParams, LSTMParams]] = []
        in_dim = cfg.input_dim
        for layer in range(cfg.layers):
            fwd = lstm_params(ps, f"enc.word{layer}_fwd", in_dim, cfg.hidden, rng)
            bwd = lstm_params(ps, f"enc.word{layer}_bwd", in_dim, cfg.hidden, rng)
            self.layers.append((fwd, bwd))
            in_dim = 2 * cfg.hidden
        self.bos = Token(
            word_id=vocab.word_id(BOS), char_ids=tuple(vocab.char_ids(BOS)), pos_id=vocab.pos_id(BOS)
        )
        self.eos = Token(
            word_id=vocab.word_id(EOS), char_ids=tuple(vocab.char_ids(EOS)), pos_id=vocab.pos_id(EOS)
        )

    def embed_token(
        self, tok: Token, train: bool = False, rng: Optional[np.random.Generator] = None
    ) -> Tensor:
        """x_input = [E_word + x_char; E_pos] for one token."""
        cfg = self.cfg
        chars = [T.lookup(self.e_char, c) for c in tok.char_ids]
        chars = [maybe_dropout(c, cfg.dropout, rng, train) for c in chars]
        h_f = run_lstm(self.char_fwd, chars)[-1]
        h_r = run_lstm(self.char_bwd, chars, reverse=True)[0]
        x_char = T.tanh(T.add(T.affine(self.w_char_l, h_f, self.b_char), T.matvec(self.w_char_r, h_r)))
        word = T.add(T.lookup(self.e_word, tok.word_id), x_char)
        return T.concat([word, T.lookup(self.e_pos, tok.pos_id)])

    def encode(
        self, tokens: Sequence[Token], train: bool = False, rng: Optional[np.random.Generator] = None
    ) -> Encoded:
        if not tokens:
            raise EmptySentence("cannot encode an empty sentence")
        cfg = self.cfg
        padded = [self.bos, *tokens, self.eos]
        xs = [self.embed_token(t, train, rng) for t in padded]
        seq: list[Tensor] = xs
        fwd: list[Tensor] = []
        bwd: list[Tensor] = []
        for fwd_p, bwd_p in self.layers:
            inp = [maybe_dropout(x, cfg.dropout, rng, train) for x in seq]
            fwd = run_lstm(fwd_p, inp)
            bwd = run_lstm(bwd_p, inp, reverse=True)
            seq = [T.concat([f, r]) for f, r in zip(fwd, bwd)]
        return Encoded(fwd=fwd, bwd=bwd, x_inputs=xs[1:-1], n=len(tokens))


def _check_span(enc: Encoded, i: int, j: int) -> None:
    if not (0 <= i <= j < enc.n):
        raise IndexOutOfRange(i, j, enc.n)


def span_v(enc: Encoded, i: int, j: int) -> Tensor:
    """Concatenation span vector [f_{i+1}; r_i; f_{j+1}; r_j] (dim 4h)."""
    _check_span(enc, i, j)
    return T.concat([enc.f(i + 1), enc.r(i), enc.f(j + 1), enc.r(j)])


def _diff(enc: Encoded, i: int, j: int) -> Tensor:
    return T.concat([T.sub(enc.f(j + 1), enc.f(i)), T.sub(enc.r(i), enc.r(j + 1))])


def span_sr(enc: Encoded, i: int, j: int) -> Tensor:
    """Difference-vector span representation with left/right context blocks.

    Empty context spans (i = 0 or j = n - 1) contribute zero vectors.
    """
    _check_span(enc, i, j)
    two_h = 2 * enc.fwd[0].shape[0]
    dtype = enc.fwd[0].dtype
    left = _diff(enc, 0, i - 1) if i > 0 else T.zeros((two_h,), dtype)
    right = _diff(enc, j + 1, enc.n - 1) if j < enc.n - 1 else T.zeros((two_h,), dtype)
    return T.concat([left, _diff(enc, i, j), right])


def load_pretrained_embeddings(path: str, vocab: Vocab, e_word: Tensor) -> int:
    """Fill embedding rows from a plain-text `word v1 .. vd` file.

    Returns the number of vocabulary words initialized; missing words keep
    their random init.
    """
    dim = e_word.data.shape[1]
    loaded = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.rstrip("\n").split(" ")
            if len(parts) != dim + 1:
                continue
            wid = vocab.exact_word_id(parts[0])
            if wid is None:
                continue
            e_word.data[wid] = np.asarray([float(v) for v in parts[1:]], dtype=e_word.data.dtype)
            loaded += 1
    return loaded
