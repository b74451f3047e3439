"""First-order split-point scorers over difference-vector span representations.

Each span role (parent P, left child L, right child R) gets its own ELU
projection of sr[i,j]; split scores come either from a shared linear layer
over the two children or from two biaffine forms against the parent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import tensor as T
from .config import ModelConfig
from .encoder import Encoded, span_sr
from .nn import ParamSet
from .tensor import Tensor
from .trees import BinaryNode

ROLES = ("P", "L", "R")


class RuleHead:
    def __init__(self, ps: ParamSet, cfg: ModelConfig, rng: np.random.Generator, biaffine: bool):
        sr_dim = 6 * cfg.hidden
        d = cfg.proj_dim
        self.biaffine = biaffine
        self.proj_w = {m: ps.matrix(f"rule.W_r_{m}", d, sr_dim, rng) for m in ROLES}
        self.proj_b = {m: ps.bias(f"rule.b_r_{m}", d) for m in ROLES}
        if biaffine:
            self.w_pl = ps.matrix("rule.W_pl", d + 1, d + 1, rng)
            self.w_pr = ps.matrix("rule.W_pr", d + 1, d + 1, rng)
        else:
            self.w_ll = ps.add("rule.w_ll", rng.uniform(-0.1, 0.1, size=(d,)))
            self.w_lr = ps.add("rule.w_lr", rng.uniform(-0.1, 0.1, size=(d,)))
            self.b_ll = ps.bias("rule.b_ll", ())

    def project(self, sr: Tensor, role: str) -> Tensor:
        """r[i,j] = ELU(W_r^M sr + b_r^M) with role-specific parameters."""
        return T.elu(T.affine(self.proj_w[role], sr, self.proj_b[role]))


def score_linear(head: RuleHead, r_left: Tensor, r_right: Tensor) -> Tensor:
    """ps_k = w_ll . r[i,k] + w_lr . r[k+1,j] + b; parameters shared over k."""
    return T.add(T.add(T.dot(head.w_ll, r_left), T.dot(head.w_lr, r_right)), head.b_ll)


def _augment(r: Tensor) -> Tensor:
    return T.concat([r, T.constant([1.0], dtype=r.data.dtype)])


def score_biaffine(head: RuleHead, r_parent_aug: tuple[Tensor, Tensor], r_left: Tensor, r_right: Tensor) -> Tensor:
    """ps_k = (rP+1)' W_pl (rL+1) + (rP+1)' W_pr (rR+1).

    r_parent_aug carries the two precomputed row vectors (rP+1)' W_pl and
    (rP+1)' W_pr so scoring each k costs two dot products.
    """
    u_l, u_r = r_parent_aug
    lps = T.dot(u_l, _augment(r_left))
    rps = T.dot(u_r, _augment(r_right))
    return T.add(lps, rps)


class RuleScorer:
    """Per-sentence context caching role projections across spans."""

    def __init__(self, head: RuleHead, enc: Encoded):
        self.head = head
        self.enc = enc
        self._proj: dict[tuple[str, int, int], Tensor] = {}
        self._parent_aug: dict[tuple[int, int], tuple[Tensor, Tensor]] = {}

    def proj(self, role: str, i: int, j: int) -> Tensor:
        key = (role, i, j)
        got = self._proj.get(key)
        if got is None:
            got = self.head.project(span_sr(self.enc, i, j), role)
            self._proj[key] = got
        return got

    def _parent_rows(self, i: int, j: int) -> tuple[Tensor, Tensor]:
        got = self._parent_aug.get((i, j))
        if got is None:
            aug = _augment(self.proj("P", i, j))
            got = (T.matvec_t(self.head.w_pl, aug), T.matvec_t(self.head.w_pr, aug))
            self._parent_aug[(i, j)] = got
        return got

    def split_scores(self, i: int, j: int) -> list[Tensor]:
        """Raw partition scores ps_k for k in [i, j-1]; requires j > i."""
        assert j > i
        out = []
        for k in range(i, j):
            r_l = self.proj("L", i, k)
            r_r = self.proj("R", k + 1, j)
            if self.head.biaffine:
                out.append(score_biaffine(self.head, self._parent_rows(i, j), r_l, r_r))
            else:
                out.append(score_linear(self.head, r_l, r_r))
        return out


def split_distribution(scores: list[Tensor]) -> np.ndarray:
    """Softmax over split scores; stable under constant shifts."""
    z = np.array([float(s.data) for s in scores], dtype=np.float64)
    z -= z.max()
    e = np.exp(z)
    return e / e.sum()


def rule_loss(head: RuleHead, enc: Encoded, gold: BinaryNode) -> tuple[Tensor, int]:
    """Negative log split probability summed over the n-1 gold productions."""
    scorer = RuleScorer(head, enc)
    terms: list[Tensor] = []
    for node in gold.internal_nodes():
        assert node.split is not None
        scores = scorer.split_scores(node.i, node.j)
        terms.append(T.pickneglogsoftmax(T.stack(scores), node.split - node.i))
    if not terms:
        return T.zeros((), enc.fwd[0].dtype), 0
    return T.add_n(terms), len(terms)


@dataclass
class SplitScores:
    """Decode-time log split distributions: logsplit[(i, j)][k - i]."""

    logsplit: dict[tuple[int, int], np.ndarray]
    n: int


def split_score_table(head: RuleHead, enc: Encoded) -> SplitScores:
    scorer = RuleScorer(head, enc)
    table: dict[tuple[int, int], np.ndarray] = {}
    for length in range(2, enc.n + 1):
        for i in range(0, enc.n - length + 1):
            j = i + length - 1
            z = np.array(
                [float(s.data) for s in scorer.split_scores(i, j)], dtype=np.float64
            )
            z -= z.max()
            table[(i, j)] = z - np.log(np.exp(z).sum())
    return SplitScores(logsplit=table, n=enc.n)
