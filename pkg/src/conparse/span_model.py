"""Local span classifiers: binary and multi-class heads, losses, transforms.

Both heads score the concatenation span vector v[i,j]; spans of length 1
are never modeled (they are constituents by construction), so a sentence
of length n contributes exactly n(n-1)/2 loss terms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tensor as T
from .config import ModelConfig
from .encoder import Encoded, span_v
from .errors import LabelNotInVocab
from .nn import ParamSet
from .tensor import Tensor
from .trees import BinaryNode
from .vocab import Vocab

NEG_INF = -1e30


class SpanHead:
    """tanh hidden layer plus a softmax output over 2 or K classes."""

    def __init__(
        self, ps: ParamSet, cfg: ModelConfig, n_classes: int, rng: np.random.Generator
    ):
        v_dim = 4 * cfg.hidden
        self.n_classes = n_classes
        self.w_o = ps.matrix("span.W_o", cfg.out_hidden, v_dim, rng)
        self.b_o = ps.bias("span.b_o", cfg.out_hidden)
        self.w_u = ps.matrix("span.W_u", n_classes, cfg.out_hidden, rng)
        self.b_u = ps.bias("span.b_u", n_classes)

    def logits(self, v: Tensor) -> Tensor:
        o = T.tanh(T.affine(self.w_o, v, self.b_o))
        return T.affine(self.w_u, o, self.b_u)

    def prob(self, v: Tensor) -> Tensor:
        return T.softmax(self.logits(v))


def binary_prob(head: SpanHead, v: Tensor) -> Tensor:
    """Distribution over {0, 1}; index 1 is 'constituent'."""
    return head.prob(v)


def multi_prob(head: SpanHead, v: Tensor) -> Tensor:
    """Distribution over labels plus the stop symbol (class id 0)."""
    return head.prob(v)


def _all_spans(n: int):
    for i in range(n - 1):
        for j in range(i + 1, n):
            yield i, j


def binary_loss(head: SpanHead, enc: Encoded, gold: BinaryNode) -> tuple[Tensor, int]:
    """Summed negative log-likelihood over every span of length >= 2."""
    gold_spans = gold.internal_spans()
    terms: list[Tensor] = []
    for i, j in _all_spans(enc.n):
        target = 1 if (i, j) in gold_spans else 0
        terms.append(T.pickneglogsoftmax(head.logits(span_v(enc, i, j)), target))
    if not terms:
        return T.zeros((), enc.fwd[0].dtype), 0
    return T.add_n(terms), len(terms)


def multi_loss(
    head: SpanHead, enc: Encoded, gold: BinaryNode, vocab: Vocab
) -> tuple[Tensor, int]:
    """Multi-class loss: every label of a gold span's chain counts once.

    Non-constituent spans train toward the stop symbol. Duplicate labels in
    a chain contribute duplicate terms, as written.
    """
    chains = {(node.i, node.j): node.chain for node in gold.internal_nodes()}
    terms: list[Tensor] = []
    for i, j in _all_spans(enc.n):
        logits = head.logits(span_v(enc, i, j))
        chain = chains.get((i, j))
        if chain is None:
            terms.append(T.pickneglogsoftmax(logits, vocab.stop_label_id))
        else:
            if not chain:
                raise LabelNotInVocab("<empty gold chain>")
            for lab in chain:
                terms.append(T.pickneglogsoftmax(logits, vocab.label_id(lab)))
    if not terms:
        return T.zeros((), enc.fwd[0].dtype), 0
    return T.add_n(terms), len(terms)


def multi_to_binary(dist: np.ndarray, stop_id: int = 0) -> np.ndarray:
    """Collapse a label distribution to P(0) = P(stop), P(1) = rest."""
    p0 = float(dist[stop_id])
    return np.array([p0, float(dist.sum()) - p0], dtype=dist.dtype)


@dataclass
class SpanScores:
    """Per-span log P(constituent) table; only j > i entries are meaningful."""

    logp1: np.ndarray
    n: int


def span_score_table(head: SpanHead, enc: Encoded, multi: bool, stop_id: int = 0) -> SpanScores:
    """Decode-time log P(Y=1) for every span of length >= 2.

    For the multi-class head the distribution is collapsed by summing all
    non-stop classes. Zero probabilities clamp to a large negative number
    so chart arithmetic stays total.
    """
    n = enc.n
    logp1 = np.zeros((n, n), dtype=np.float64)
    for i, j in _all_spans(n):
        z = head.logits(span_v(enc, i, j)).data.astype(np.float64)
        z = z - z.max()
        logz = np.log(np.exp(z).sum())
        if multi:
            rest = np.delete(z, stop_id)
            m = rest.max()
            log_num = m + np.log(np.exp(rest - m).sum())
        else:
            log_num = z[1]
        val = log_num - logz
        logp1[i, j] = max(val, NEG_INF)
    return SpanScores(logp1=logp1, n=n)
