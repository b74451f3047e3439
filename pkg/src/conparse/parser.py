"""The full parsing model: one encoder, a variant-specific unlabeled parser,
and the shared label generator.

Decoding runs encoder -> variant scorer -> CKY -> tree-LSTM -> greedy label
chains -> debinarization, with fallbacks that keep the pipeline total: an
empty or intermediate chain on a non-root span is spliced out, an unusable
root chain is replaced by the most frequent training root label.
"""

from __future__ import annotations

import dataclasses
from typing import Optional, Sequence

import numpy as np

from . import rule_model, span_model
from . import tensor as T
from .chart import Source, SpanScoreSource, SplitScoreSource, cky
from .config import ModelConfig
from .encoder import Encoded, Encoder, Token, tokens_for_sentence
from .labeler import Labeler
from .nn import ParamSet
from .rule_model import RuleHead
from .span_model import SpanHead
from .tensor import Tensor
from .trees import BinaryNode, Tree, debinarize
from .vocab import Vocab


class ParserModel:
    def __init__(
        self,
        cfg: ModelConfig,
        vocab: Vocab,
        seed: int = 1,
        dtype=np.float32,
    ):
        cfg.validate()
        self.cfg = cfg
        self.vocab = vocab
        self.params = ParamSet(dtype)
        rng = np.random.default_rng(seed)
        self.encoder = Encoder(self.params, cfg, vocab, rng)
        self.span_head: Optional[SpanHead] = None
        self.rule_head: Optional[RuleHead] = None
        if cfg.variant == "binary-span":
            self.span_head = SpanHead(self.params, cfg, 2, rng)
        elif cfg.variant == "multi-span":
            self.span_head = SpanHead(self.params, cfg, vocab.n_labels, rng)
        elif cfg.variant == "linear-rule":
            self.rule_head = RuleHead(self.params, cfg, rng, biaffine=False)
        else:
            self.rule_head = RuleHead(self.params, cfg, rng, biaffine=True)
        self.labeler = Labeler(self.params, cfg, vocab, rng)

    # -- training side ------------------------------------------------------

    def data_loss(
        self,
        tokens: Sequence[Token],
        gold: BinaryNode,
        train: bool = False,
        rng: Optional[np.random.Generator] = None,
    ) -> tuple[Tensor, dict[str, int]]:
        """L_parser + L_label for one sentence (no regularizer)."""
        enc = self.encoder.encode(tokens, train, rng)
        counters: dict[str, int] = {}
        if self.cfg.variant == "binary-span":
            assert self.span_head is not None
            parser_loss, n = span_model.binary_loss(self.span_head, enc, gold)
            counters["parser_terms"] = n
        elif self.cfg.variant == "multi-span":
            assert self.span_head is not None
            parser_loss, n = span_model.multi_loss(self.span_head, enc, gold, self.vocab)
            counters["parser_terms"] = n
        else:
            assert self.rule_head is not None
            parser_loss, n = rule_model.rule_loss(self.rule_head, enc, gold)
            counters["parser_terms"] = n
        states = self.labeler.tree_states(gold, enc, train, rng)
        label_loss, m = self.labeler.label_loss(states, gold, train, rng)
        counters["label_terms"] = m
        return T.add(parser_loss, label_loss), counters

    # -- decode side ----------------------------------------------------------

    def score_source(self, enc: Encoded) -> Source:
        if self.span_head is not None:
            table = span_model.span_score_table(
                self.span_head, enc, multi=(self.cfg.variant == "multi-span"),
                stop_id=self.vocab.stop_label_id,
            )
            return SpanScoreSource(table)
        assert self.rule_head is not None
        return SplitScoreSource(rule_model.split_score_table(self.rule_head, enc))

    def parse_tokens(
        self,
        words: Sequence[str],
        tags: Sequence[str],
        return_source: bool = False,
    ):
        """Parse one tagged sentence into an n-ary Tree.

        Returns (tree, binary_tree) or (tree, binary_tree, source) when the
        score source is requested for chart dumps.
        """
        tokens = tokens_for_sentence(words, tags, self.vocab)
        enc = self.encoder.encode(tokens)
        n = len(tokens)
        source: Optional[Source] = None
        if n == 1:
            skeleton = BinaryNode(i=0, j=0, chain=())
        else:
            source = self.score_source(enc)
            skeleton = cky(source)
        states = self.labeler.tree_states(skeleton, enc)
        labeled = self._label_tree(skeleton, states, words, tags, is_root=True)
        tree = debinarize(labeled)
        if return_source:
            return tree, labeled, source
        return tree, labeled

    def _label_tree(
        self,
        node: BinaryNode,
        states,
        words: Sequence[str],
        tags: Sequence[str],
        is_root: bool,
    ) -> BinaryNode:
        chain, _capped = self.labeler.decode_chain(states[(node.i, node.j)].h)
        if chain and chain[0].endswith("*"):
            # intermediate prediction: keep only the marker, drop the rest
            chain = (chain[0],)
        if is_root and (not chain or chain[0].endswith("*")):
            if node.is_leaf:
                chain = ()
            else:
                chain = (self.vocab.root_label,)
        if node.is_leaf:
            return dataclasses.replace(
                node, chain=chain, word=words[node.i], pos=tags[node.i]
            )
        left = self._label_tree(node.left, states, words, tags, is_root=False)
        right = self._label_tree(node.right, states, words, tags, is_root=False)
        return dataclasses.replace(node, chain=chain, left=left, right=right)
