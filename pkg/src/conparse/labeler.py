"""Lexicalized binary tree-LSTM over a decoded tree plus a label-chain decoder.

Lexical vectors tx flow bottom-up through a convex-combination gate; each
node's hidden/cell state comes from a binary tree-LSTM cell whose input,
forget and output gates see both children's hidden and cell vectors. The
per-span decoder is a conditional language model over label chains ending
in the stop symbol, capped at 4 labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import tensor as T
from .config import ModelConfig
from .encoder import Encoded
from .nn import ParamSet, lstm_params, lstm_step, maybe_dropout
from .tensor import Tensor
from .trees import BinaryNode
from .vocab import Vocab

MAX_CHAIN = 4


@dataclass
class NodeState:
    tx: Tensor
    h: Tensor
    c: Tensor


class Labeler:
    def __init__(self, ps: ParamSet, cfg: ModelConfig, vocab: Vocab, rng: np.random.Generator):
        self.cfg = cfg
        self.vocab = vocab
        tx_dim = 2 * cfg.hidden + cfg.input_dim
        hid = cfg.tree_hidden
        self.tx_dim = tx_dim
        self.hid = hid
        # lexical gate over [tx_l; tx_r; h_l; h_r]
        self.w_lex = ps.matrix("lab.W_lex", tx_dim, 2 * tx_dim + 2 * hid, rng)
        self.b_lex = ps.bias("lab.b_lex", tx_dim)
        # i, f_l, f_r gates over [tx; h_l; c_l; h_r; c_r]
        self.w_gates = ps.matrix("lab.W_gates", 3 * hid, tx_dim + 4 * hid, rng)
        self.b_gates = ps.bias("lab.b_gates", 3 * hid)
        # candidate over [tx; h_l; h_r]
        self.w_g = ps.matrix("lab.W_g", hid, tx_dim + 2 * hid, rng)
        self.b_g = ps.bias("lab.b_g", hid)
        # output gate over [tx; h_l; h_r] with a peephole on the fresh cell
        self.w_o = ps.matrix("lab.W_o", hid, tx_dim + 2 * hid, rng)
        self.w_oc = ps.matrix("lab.W_oc", hid, hid, rng)
        self.b_o = ps.bias("lab.b_o", hid)
        # decoder: label embeddings (stop + labels + start row), LSTM, combiner
        self.e_label = ps.embedding("lab.E_label", vocab.n_labels + 1, cfg.label_dim, rng)
        self.dec = lstm_params(ps, "lab.dec", cfg.label_dim, cfg.label_hidden, rng)
        comb_in = hid + cfg.label_dim + cfg.label_hidden
        self.w_c1 = ps.matrix("lab.W_c1", cfg.out_hidden, comb_in, rng)
        self.b_c1 = ps.bias("lab.b_c1", cfg.out_hidden)
        self.w_c2 = ps.matrix("lab.W_c2", vocab.n_labels, cfg.out_hidden, rng)
        self.b_c2 = ps.bias("lab.b_c2", vocab.n_labels)

    # -- tree encoder -----------------------------------------------------

    def lexical_gate(self, tx_l: Tensor, tx_r: Tensor, h_l: Tensor, h_r: Tensor) -> Tensor:
        gate = T.sigmoid(T.affine(self.w_lex, T.concat([tx_l, tx_r, h_l, h_r]), self.b_lex))
        one = T.constant(np.ones(gate.shape), dtype=gate.data.dtype)
        return T.add(T.mul(gate, tx_l), T.mul(T.sub(one, gate), tx_r))

    def cell(
        self,
        tx: Tensor,
        h_l: Tensor,
        c_l: Tensor,
        h_r: Tensor,
        c_r: Tensor,
    ) -> tuple[Tensor, Tensor]:
        hid = self.hid
        z = T.affine(self.w_gates, T.concat([tx, h_l, c_l, h_r, c_r]), self.b_gates)
        i_g = T.sigmoid(T.narrow(z, 0, hid))
        f_l = T.sigmoid(T.narrow(z, hid, 2 * hid))
        f_r = T.sigmoid(T.narrow(z, 2 * hid, 3 * hid))
        g = T.tanh(T.affine(self.w_g, T.concat([tx, h_l, h_r]), self.b_g))
        c_p = T.add_n([T.mul(f_l, c_l), T.mul(f_r, c_r), T.mul(i_g, g)])
        o = T.sigmoid(
            T.add(T.affine(self.w_o, T.concat([tx, h_l, h_r]), self.b_o), T.matvec(self.w_oc, c_p))
        )
        h_p = T.mul(o, T.tanh(c_p))
        return h_p, c_p

    def leaf_tx(self, enc: Encoded, i: int) -> Tensor:
        return T.concat([enc.f(i + 1), enc.r(i), enc.x_inputs[i]])

    def tree_states(
        self,
        tree: BinaryNode,
        enc: Encoded,
        train: bool = False,
        rng: Optional[np.random.Generator] = None,
    ) -> dict[tuple[int, int], NodeState]:
        """Bottom-up NodeState for every node of the (unlabeled) tree."""
        dtype = enc.fwd[0].dtype
        zero = T.zeros((self.hid,), dtype)
        states: dict[tuple[int, int], NodeState] = {}

        def walk(node: BinaryNode) -> NodeState:
            if node.is_leaf:
                tx = self.leaf_tx(enc, node.i)
                tx_in = maybe_dropout(tx, self.cfg.dropout, rng, train)
                h, c = self.cell(tx_in, zero, zero, zero, zero)
            else:
                left = walk(node.left)  # type: ignore[arg-type]
                right = walk(node.right)  # type: ignore[arg-type]
                tx = self.lexical_gate(left.tx, right.tx, left.h, right.h)
                tx_in = maybe_dropout(tx, self.cfg.dropout, rng, train)
                h, c = self.cell(tx_in, left.h, left.c, right.h, right.c)
            state = NodeState(tx=tx, h=h, c=c)
            states[(node.i, node.j)] = state
            return state

        walk(tree)
        return states

    # -- label decoder ------------------------------------------------------

    def _step_logits(
        self, h_span: Tensor, prev_id: int, dec_state: tuple[Tensor, Tensor], train: bool, rng
    ) -> tuple[Tensor, tuple[Tensor, Tensor]]:
        e = T.lookup(self.e_label, prev_id)
        e_in = maybe_dropout(e, self.cfg.dropout, rng, train)
        d_h, d_c = lstm_step(self.dec, e_in, *dec_state)
        comb = T.tanh(T.affine(self.w_c1, T.concat([h_span, e, d_h]), self.b_c1))
        return T.affine(self.w_c2, comb, self.b_c2), (d_h, d_c)

    def _init_state(self, dtype) -> tuple[Tensor, Tensor]:
        return (T.zeros((self.cfg.label_hidden,), dtype), T.zeros((self.cfg.label_hidden,), dtype))

    def decode_chain(self, h_span: Tensor) -> tuple[tuple[str, ...], bool]:
        """Greedy label chain for one span; returns (labels, hit_cap)."""
        state = self._init_state(h_span.dtype)
        prev = self.vocab.start_label_id
        labels: list[str] = []
        for _ in range(MAX_CHAIN):
            logits, state = self._step_logits(h_span, prev, state, train=False, rng=None)
            nxt = int(np.argmax(logits.data))
            if nxt == self.vocab.stop_label_id:
                return tuple(labels), False
            labels.append(self.vocab.labels[nxt])
            prev = nxt
        return tuple(labels), True

    def label_loss(
        self,
        states: dict[tuple[int, int], NodeState],
        gold: BinaryNode,
        train: bool = False,
        rng: Optional[np.random.Generator] = None,
    ) -> tuple[Tensor, int]:
        """Teacher-forced NLL over every node's chain plus its terminator."""
        terms: list[Tensor] = []
        for node in gold.iter_nodes():
            h_span = states[(node.i, node.j)].h
            targets = [self.vocab.label_id(lab) for lab in node.chain]
            targets.append(self.vocab.stop_label_id)
            state = self._init_state(h_span.dtype)
            prev = self.vocab.start_label_id
            for tgt in targets:
                logits, state = self._step_logits(h_span, prev, state, train, rng)
                terms.append(T.pickneglogsoftmax(logits, tgt))
                prev = tgt
        return T.add_n(terms), len(terms)
