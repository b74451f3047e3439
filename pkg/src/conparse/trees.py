"""Penn-bracketed trees, unary-chain collapsing, and head-driven binarization.

All tree types here are immutable; the transforms are pure functions and safe
to call concurrently.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Union

from .errors import ChainTooLong, EmptyNode, UnbalancedBrackets, UnknownCategory

_TOP_LABELS = frozenset({"", "TOP", "ROOT", "S1"})


@dataclass(frozen=True)
class Leaf:
    """Terminal node: a word together with its POS tag."""

    word: str
    pos: str

    @property
    def is_leaf(self) -> bool:
        return True


@dataclass(frozen=True)
class Internal:
    """Non-terminal node with a constituent label and ordered children."""

    label: str
    children: tuple["Tree", ...]

    @property
    def is_leaf(self) -> bool:
        return False


Tree = Union[Leaf, Internal]


def leaves(t: Tree) -> list[Leaf]:
    if isinstance(t, Leaf):
        return [t]
    out: list[Leaf] = []
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            out.append(node)
        else:
            stack.extend(reversed(node.children))
    return out


def render(t: Tree) -> str:
    """Inverse of parse_bracketed for a single tree."""
    if isinstance(t, Leaf):
        return f"({t.pos} {t.word})"
    inner = " ".join(render(c) for c in t.children)
    return f"({t.label} {inner})"


def _strip_functional(label: str) -> str:
    # Functional tags (NP-SBJ, NP=2) are cut at the first - or =; labels that
    # *start* with - (-NONE-, -LRB-) are escape tokens and stay verbatim.
    if not label or label[0] == "-":
        return label
    for sep in ("-", "="):
        k = label.find(sep)
        if k > 0:
            label = label[:k]
    return label


def _tokenize(text: str) -> list[tuple[str, int]]:
    toks: list[tuple[str, int]] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in "()":
            toks.append((ch, i))
            i += 1
        elif ch.isspace():
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            toks.append((text[i:j], i))
            i = j
    return toks


def parse_bracketed(
    text: str, strip_top: bool = True, strip_functional: bool = True
) -> list[Tree]:
    """Read one or more Penn-bracketed trees from text.

    Leaves are written ``(POS word)``. A top-level wrapper with an empty,
    TOP, ROOT or S1 label around a single child is removed when strip_top
    is set; otherwise an empty label raises EmptyNode.
    """
    toks = _tokenize(text)
    trees: list[Tree] = []
    pos = 0

    def parse_node(at: int, top: bool) -> tuple[Tree, int]:
        # caller consumed the opening paren at toks[at - 1]
        if at >= len(toks):
            raise UnbalancedBrackets(toks[-1][1] if toks else 0)
        tok, tpos = toks[at]
        if tok == ")":
            raise EmptyNode(tpos)
        label = ""
        label_pos = tpos
        if tok != "(":
            label = tok
            at += 1
        children: list[Tree] = []
        word: Optional[str] = None
        while at < len(toks):
            tok, tpos = toks[at]
            if tok == ")":
                at += 1
                if word is not None:
                    return Leaf(word=word, pos=label), at
                if not children:
                    raise EmptyNode(label_pos)
                if label == "":
                    if top and strip_top and len(children) == 1:
                        return children[0], at
                    raise EmptyNode(label_pos)
                lab = _strip_functional(label) if strip_functional else label
                node: Tree = Internal(lab, tuple(children))
                if top and strip_top and lab in _TOP_LABELS and len(children) == 1:
                    node = children[0]
                return node, at
            if tok == "(":
                if word is not None:
                    raise EmptyNode(tpos)
                child, at = parse_node(at + 1, top=False)
                children.append(child)
            else:
                if children or word is not None:
                    raise EmptyNode(tpos)
                word = tok
                at += 1
        raise UnbalancedBrackets(toks[-1][1])

    while pos < len(toks):
        tok, tpos = toks[pos]
        if tok != "(":
            raise UnbalancedBrackets(tpos)
        tree, pos = parse_node(pos + 1, top=True)
        trees.append(tree)
    return trees


def read_trees(path: str, strip_top: bool = True, strip_functional: bool = True) -> list[Tree]:
    with open(path, encoding="utf-8") as fh:
        return parse_bracketed(fh.read(), strip_top=strip_top, strip_functional=strip_functional)


# ---------------------------------------------------------------------------
# Unary-chain collapsing


@dataclass(frozen=True)
class CollapsedNode:
    """Tree node after absorbing unary chains.

    chain lists constituent labels bottom-up (innermost first). Internal
    nodes always carry at least one label and at least two children; leaf
    nodes keep the (word, pos) payload and may carry an empty chain.
    """

    chain: tuple[str, ...]
    children: tuple["CollapsedNode", ...] = ()
    word: Optional[str] = None
    pos: Optional[str] = None

    @property
    def is_leaf(self) -> bool:
        return self.word is not None


def collapse_unary(t: Tree, cap: int = 4) -> CollapsedNode:
    """Absorb every maximal unary chain into a single node.

    Chains over a single word are absorbed into the leaf itself, so no
    collapsed internal node has fewer than two children. Raises
    ChainTooLong when a gold chain exceeds the cap.
    """

    def walk(node: Tree, offset: int) -> tuple[CollapsedNode, int]:
        labels: list[str] = []
        cur = node
        while isinstance(cur, Internal):
            labels.append(cur.label)
            if len(cur.children) != 1:
                break
            cur = cur.children[0]
        chain = tuple(reversed(labels))
        if isinstance(cur, Leaf):
            if len(chain) > cap:
                raise ChainTooLong((offset, offset), len(chain), cap)
            return CollapsedNode(chain=chain, word=cur.word, pos=cur.pos), 1
        kids: list[CollapsedNode] = []
        width = 0
        for ch in cur.children:
            k, w = walk(ch, offset + width)
            kids.append(k)
            width += w
        if len(chain) > cap:
            raise ChainTooLong((offset, offset + width - 1), len(chain), cap)
        return CollapsedNode(chain=chain, children=tuple(kids)), width

    collapsed, _ = walk(t, 0)
    return collapsed


# ---------------------------------------------------------------------------
# Head rules


@dataclass(frozen=True)
class HeadRule:
    direction: str  # "left" or "right": which end the scan starts from
    priorities: tuple[str, ...]


class HeadTable:
    """Head-percolation table: per-category direction and priority list."""

    def __init__(self, rules: dict[str, HeadRule], default: Optional[str] = "right"):
        if default not in (None, "left", "right"):
            raise ValueError(f"bad default direction {default!r}")
        self.rules = dict(rules)
        self.default = default

    @classmethod
    def from_text(cls, text: str, default: Optional[str] = "right") -> "HeadTable":
        rules: dict[str, HeadRule] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) < 2 or parts[1] not in ("left", "right"):
                raise ValueError(f"bad head rule on line {lineno}: {raw!r}")
            rules[parts[0]] = HeadRule(parts[1], tuple(parts[2:]))
        return cls(rules, default=default)

    @classmethod
    def load(cls, path: str, default: Optional[str] = "right") -> "HeadTable":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read(), default=default)

    def head_index(self, parent: str, children: Sequence[str]) -> int:
        rule = self.rules.get(parent)
        if rule is None:
            if self.default is None:
                raise UnknownCategory(parent)
            return 0 if self.default == "left" else len(children) - 1
        order = (
            range(len(children))
            if rule.direction == "left"
            else range(len(children) - 1, -1, -1)
        )
        idx = list(order)
        for cat in rule.priorities:
            for i in idx:
                if children[i] == cat:
                    return i
        return idx[0]


DEFAULT_HEAD_RULES = """\
# Collins-style head percolation rules for the Penn Treebank label set.
# Format: CATEGORY left|right priority categories...
ADJP left NNS QP NN $ ADVP JJ VBN VBG ADJP JJR NP JJS DT FW RBR RBS SBAR RB
ADVP right RB RBR RBS FW ADVP TO CD JJR JJ IN NP JJS NN
CONJP right CC RB IN
FRAG right
INTJ left
LST right LS :
NAC left NN NNS NNP NNPS NP NAC EX $ CD QP PRP VBG JJ JJS JJR ADJP FW
NP right POS NN NNP NNPS NNS NX JJR CD JJ JJS RB QP NP
NX right POS NN NNP NNPS NNS NX JJR CD JJ JJS RB QP NP
PP right IN TO VBG VBN RP FW
PRN left
PRT right RP
QP left $ IN NNS NN JJ RB DT CD QP JJR JJS
RRC right VP NP ADVP ADJP PP
S left TO IN VP S SBAR ADJP UCP NP
SBAR left WHNP WHPP WHADVP WHADJP IN DT S SQ SINV SBAR FRAG
SBARQ left SQ S SINV SBARQ FRAG
SINV left VBZ VBD VBP VB MD VP S SINV ADJP NP
SQ left VBZ VBD VBP VB MD VP SQ
UCP right
VP left TO VBD VBN MD VBZ VB VBG VBP VP ADJP NN NNS NP
WHADJP left CC WRB JJ ADJP
WHADVP right CC WRB
WHNP left WDT WP WP$ WHADJP WHPP WHNP
WHPP right IN TO FW
X right
"""


def default_head_table() -> HeadTable:
    return HeadTable.from_text(DEFAULT_HEAD_RULES)


# ---------------------------------------------------------------------------
# Binarization


@dataclass(frozen=True)
class BinaryNode:
    """Node of a head-binarized tree over the inclusive word span [i, j].

    Intermediate nodes introduced by binarization carry the single chain
    label ``parent-label + "*"``; predicted trees may carry empty chains.
    """

    i: int
    j: int
    chain: tuple[str, ...]
    left: Optional["BinaryNode"] = None
    right: Optional["BinaryNode"] = None
    split: Optional[int] = None
    word: Optional[str] = None
    pos: Optional[str] = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    @property
    def is_intermediate(self) -> bool:
        return bool(self.chain) and self.chain[0].endswith("*")

    def iter_nodes(self) -> Iterator["BinaryNode"]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            if node.right is not None:
                stack.append(node.right)
            if node.left is not None:
                stack.append(node.left)

    def internal_nodes(self) -> list["BinaryNode"]:
        return [n for n in self.iter_nodes() if not n.is_leaf]

    def internal_spans(self) -> set[tuple[int, int]]:
        return {(n.i, n.j) for n in self.iter_nodes() if not n.is_leaf}


def _outer_label(node: CollapsedNode) -> str:
    if node.chain:
        return node.chain[-1]
    assert node.pos is not None
    return node.pos


def binarize(c: CollapsedNode, heads: HeadTable) -> BinaryNode:
    """Turn a collapsed tree into a binary tree with intermediate ``X*`` nodes.

    Children of an n-ary node are folded onto the head child, nearest right
    sibling first, then the left ones, so head direction is deterministic
    even though it carries no weight downstream.
    """

    def walk(node: CollapsedNode, offset: int) -> tuple[BinaryNode, int]:
        if node.is_leaf:
            return (
                BinaryNode(i=offset, j=offset, chain=node.chain, word=node.word, pos=node.pos),
                1,
            )
        kids: list[BinaryNode] = []
        child_labels = [_outer_label(ch) for ch in node.children]
        width = 0
        for ch in node.children:
            b, w = walk(ch, offset + width)
            kids.append(b)
            width += w
        star = (node.chain[0] + "*",)
        hidx = heads.head_index(node.chain[0], child_labels)
        while len(kids) > 1:
            if hidx < len(kids) - 1:
                l, r = kids[hidx], kids[hidx + 1]
                kids[hidx : hidx + 2] = [
                    BinaryNode(i=l.i, j=r.j, chain=star, left=l, right=r, split=l.j)
                ]
            else:
                l, r = kids[hidx - 1], kids[hidx]
                kids[hidx - 1 : hidx + 1] = [
                    BinaryNode(i=l.i, j=r.j, chain=star, left=l, right=r, split=l.j)
                ]
                hidx -= 1
        top = dataclasses.replace(kids[0], chain=node.chain)
        return top, width

    root, _ = walk(c, 0)
    return root


def debinarize(b: BinaryNode) -> Tree:
    """Splice out intermediate nodes and re-expand label chains.

    Inverse of ``binarize(collapse_unary(t))`` whenever every chain in t
    fits the cap. Internal nodes with empty chains (a label-generator
    fallback) are spliced like intermediates.
    """

    def expand(node: BinaryNode) -> list[Tree]:
        if node.is_leaf:
            assert node.word is not None and node.pos is not None
            core: Tree = Leaf(word=node.word, pos=node.pos)
            for lab in node.chain:
                core = Internal(lab, (core,))
            return [core]
        assert node.left is not None and node.right is not None
        kids = expand(node.left) + expand(node.right)
        if node.is_intermediate or not node.chain:
            return kids
        core = Internal(node.chain[0], tuple(kids))
        for lab in node.chain[1:]:
            core = Internal(lab, (core,))
        return [core]

    out = expand(b)
    if len(out) != 1:
        raise ValueError("root of a binary tree must carry a usable label chain")
    return out[0]


def binarize_corpus(
    ts: Sequence[Tree], heads: HeadTable, cap: int = 4
) -> tuple[list[BinaryNode], int]:
    """Collapse+binarize a corpus, skipping (and counting) ChainTooLong trees."""
    out: list[BinaryNode] = []
    skipped = 0
    for t in ts:
        try:
            out.append(binarize(collapse_unary(t, cap=cap), heads))
        except ChainTooLong:
            skipped += 1
    return out, skipped
