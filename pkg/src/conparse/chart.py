"""CKY decoding over local log-scores, plus a brute-force enumeration oracle.

Two score sources share one decoder: span scores attach log P(Y=1) to each
chart cell (zero-order), split scores attach log P(k | [i,j]) to each
production (first-order). Ties always keep the smallest split point, in
the decoder and the oracle alike.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Protocol, Union

import numpy as np

from .errors import NonFiniteScore, TooLarge
from .rule_model import SplitScores
from .span_model import SpanScores
from .trees import BinaryNode

ENUM_LIMIT = 12


class ScoreSource(Protocol):
    n: int

    def node_score(self, i: int, j: int) -> float: ...

    def split_score(self, i: int, j: int, k: int) -> float: ...


@dataclass
class SpanScoreSource:
    """Zero-order source: per-span log P(Y=1), no production scores."""

    scores: SpanScores

    @property
    def n(self) -> int:
        return self.scores.n

    def node_score(self, i: int, j: int) -> float:
        return float(self.scores.logp1[i, j])

    def split_score(self, i: int, j: int, k: int) -> float:
        return 0.0


@dataclass
class SplitScoreSource:
    """First-order source: per-production log P(split k | [i,j])."""

    scores: SplitScores

    @property
    def n(self) -> int:
        return self.scores.n

    def node_score(self, i: int, j: int) -> float:
        return 0.0

    def split_score(self, i: int, j: int, k: int) -> float:
        return float(self.scores.logsplit[(i, j)][k - i])


Source = Union[SpanScoreSource, SplitScoreSource]


def _leaf(i: int) -> BinaryNode:
    return BinaryNode(i=i, j=i, chain=())


def cky(source: Source) -> BinaryNode:
    """Argmax unlabeled binary tree under the product of local probabilities.

    Raises NonFiniteScore on NaN or +inf inputs; -inf should be clamped by
    the score tables before reaching the chart.
    """
    n = source.n
    if n == 1:
        return _leaf(0)
    c = np.zeros((n, n), dtype=np.float64)
    b = np.zeros((n, n), dtype=np.int64)
    for length in range(2, n + 1):
        for i in range(0, n - length + 1):
            j = i + length - 1
            node = source.node_score(i, j)
            if not math.isfinite(node):
                raise NonFiniteScore(i, j)
            best = -math.inf
            best_k = i
            for k in range(i, j):
                s = source.split_score(i, j, k)
                if not math.isfinite(s):
                    raise NonFiniteScore(i, j)
                cand = s + c[i, k] + c[k + 1, j]
                if best < cand:
                    best = cand
                    best_k = k
            c[i, j] = node + best
            b[i, j] = best_k

    def backtrace(i: int, j: int) -> BinaryNode:
        if i == j:
            return _leaf(i)
        k = int(b[i, j])
        return BinaryNode(
            i=i, j=j, chain=(), left=backtrace(i, k), right=backtrace(k + 1, j), split=k
        )

    return backtrace(0, n - 1)


def dump_chart(source: Source) -> str:
    """Text rendering of the C and B tables, for --dump-chart."""
    n = source.n
    lines = []
    if n == 1:
        return "n=1 (no chart)\n"
    c = np.zeros((n, n))
    b = np.full((n, n), -1, dtype=np.int64)
    for length in range(2, n + 1):
        for i in range(0, n - length + 1):
            j = i + length - 1
            cands = [source.split_score(i, j, k) + c[i, k] + c[k + 1, j] for k in range(i, j)]
            k = int(np.argmax(cands))  # argmax keeps the first (smallest) max
            c[i, j] = source.node_score(i, j) + cands[k]
            b[i, j] = i + k
    for i in range(n):
        for j in range(i + 1, n):
            lines.append(f"C[{i},{j}]={c[i, j]:.4f} B[{i},{j}]={b[i, j]}")
    return "\n".join(lines) + "\n"


@lru_cache(maxsize=None)
def _enumerate_span(i: int, j: int) -> tuple[BinaryNode, ...]:
    if i == j:
        return (_leaf(i),)
    out = []
    for k in range(i, j):
        for left in _enumerate_span(i, k):
            for right in _enumerate_span(k + 1, j):
                out.append(BinaryNode(i=i, j=j, chain=(), left=left, right=right, split=k))
    return tuple(out)


def enumerate_trees(n: int) -> list[BinaryNode]:
    """All full binary trees over n ordered leaves (Catalan(n-1) of them)."""
    if not 1 <= n <= ENUM_LIMIT:
        raise TooLarge(n, ENUM_LIMIT)
    return list(_enumerate_span(0, n - 1))


def tree_score(source: Source, tree: BinaryNode) -> float:
    """Log-score of a specific tree under the same semantics as cky."""
    total = 0.0
    for node in tree.internal_nodes():
        assert node.split is not None
        total += source.node_score(node.i, node.j)
        total += source.split_score(node.i, node.j, node.split)
    return total


def _preorder_splits(tree: BinaryNode) -> tuple[int, ...]:
    out: list[int] = []

    def walk(node: BinaryNode) -> None:
        if node.is_leaf:
            return
        assert node.split is not None
        out.append(node.split)
        walk(node.left)  # type: ignore[arg-type]
        walk(node.right)  # type: ignore[arg-type]

    walk(tree)
    return tuple(out)


def oracle_best(source: Source) -> BinaryNode:
    """Exhaustive argmax with the cky tie-break (smallest split, top-down)."""
    n = source.n
    if n > ENUM_LIMIT:
        raise TooLarge(n, ENUM_LIMIT)
    trees = enumerate_trees(n)
    return min(trees, key=lambda t: (-tree_score(source, t), _preorder_splits(t)))
