"""Seeded random tree generators used across the test suite."""

from __future__ import annotations

import numpy as np

from conparse.trees import Internal, Leaf, Tree

LABELS = ["S", "NP", "VP", "PP", "ADJP", "ADVP", "SBAR", "QP"]
POS_TAGS = ["DT", "NN", "NNS", "VBZ", "VBD", "IN", "JJ", "RB", "CC", "TO"]
WORDS = [
    "the", "a", "dog", "cat", "dogs", "runs", "ran", "sees", "saw", "big",
    "small", "quickly", "on", "under", "and", "to", "bird", "tree", "old",
    "price", "stock", "falls", "keeps", "green", "ideas", "sleep",
]


def random_tree(
    rng: np.random.Generator,
    n_leaves: int,
    unary_p: float = 0.2,
    max_extra_chain: int = 2,
    long_chain_p: float = 0.0,
) -> Tree:
    """A random n-ary labeled tree over n_leaves words.

    Unary chains appear above leaves and internal nodes with probability
    unary_p, at most max_extra_chain labels deep, so generated chains stay
    within the default cap when max_extra_chain <= 2. long_chain_p injects
    rare 5-label chains that exceed the default cap of 4.
    """

    def wrap(node: Tree) -> Tree:
        if long_chain_p > 0 and rng.random() < long_chain_p:
            for _ in range(5):
                node = Internal(str(rng.choice(LABELS)), (node,))
            return node
        depth = 0
        while rng.random() < unary_p and depth < max_extra_chain:
            node = Internal(str(rng.choice(LABELS)), (node,))
            depth += 1
        return node

    def gen(n: int) -> Tree:
        if n == 1:
            leaf = Leaf(word=str(rng.choice(WORDS)), pos=str(rng.choice(POS_TAGS)))
            return wrap(leaf)
        arity = int(rng.integers(2, min(4, n) + 1))
        cuts = sorted(rng.choice(np.arange(1, n), size=arity - 1, replace=False))
        sizes = np.diff([0, *cuts, n])
        children = tuple(gen(int(s)) for s in sizes)
        return wrap(Internal(str(rng.choice(LABELS)), children))

    root = gen(n_leaves)
    if isinstance(root, Leaf):
        root = Internal("S", (root,))
    return root


def random_corpus(
    seed: int, size: int, min_leaves: int = 2, max_leaves: int = 10, **kw
) -> list[Tree]:
    rng = np.random.default_rng(seed)
    return [
        random_tree(rng, int(rng.integers(min_leaves, max_leaves + 1)), **kw)
        for _ in range(size)
    ]


def random_binary_gold(rng: np.random.Generator, n: int):
    """A uniformly random full binary tree skeleton over n leaves."""
    from conparse.trees import BinaryNode

    def gen(i: int, j: int) -> BinaryNode:
        if i == j:
            return BinaryNode(i=i, j=i, chain=())
        k = int(rng.integers(i, j))
        return BinaryNode(
            i=i, j=j, chain=(), left=gen(i, k), right=gen(k + 1, j), split=k
        )

    return gen(0, n - 1)
