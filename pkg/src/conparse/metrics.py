"""Bracketing evaluation: labeled P/R/F over debinarized trees, unlabeled F1
over binary structure.

Bracket sets use multiset semantics and corpus scores micro-average the
match/gold/pred counts. The default parameters delete the standard
punctuation POS set and skip a root bracket labeled TOP/ROOT/S1.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import LengthMismatch
from .trees import BinaryNode, Internal, Leaf, Tree

DEFAULT_DELETE_POS = frozenset({",", ".", ":", "``", "''", "-NONE-"})
ROOT_LABELS = frozenset({"TOP", "ROOT", "S1"})


@dataclass(frozen=True)
class EvalParams:
    delete_pos: frozenset = DEFAULT_DELETE_POS
    exclude_root_labels: frozenset = ROOT_LABELS

    @classmethod
    def strict(cls) -> "EvalParams":
        """Delete nothing; count every bracket including a TOP root."""
        return cls(delete_pos=frozenset(), exclude_root_labels=frozenset())


def labeled_brackets(t: Tree, params: EvalParams = EvalParams()) -> Counter:
    """Multiset of (label, i, j) over non-deleted leaves.

    Unary spines contribute one bracket per level; POS leaves contribute
    none; nodes covering only deleted tokens vanish.
    """
    out: Counter = Counter()

    def walk(node: Tree, offset: int, is_root: bool) -> int:
        """Returns the number of non-deleted leaves under node."""
        if isinstance(node, Leaf):
            return 0 if node.pos in params.delete_pos else 1
        width = 0
        for ch in node.children:
            width += walk(ch, offset + width, False)
        skip = is_root and node.label in params.exclude_root_labels
        if width > 0 and not skip:
            out[(node.label, offset, offset + width - 1)] += 1
        return width

    walk(t, 0, True)
    return out


def prf(gold: Counter, pred: Counter) -> tuple[float, float, float]:
    """Precision, recall, F1 from bracket multisets; empty denominators give 0."""
    match = sum((gold & pred).values())
    return _prf_counts(match, sum(gold.values()), sum(pred.values()))


def _prf_counts(match: int, n_gold: int, n_pred: int) -> tuple[float, float, float]:
    p = match / n_pred if n_pred else 0.0
    r = match / n_gold if n_gold else 0.0
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f


def unlabeled_spans(t: BinaryNode) -> Counter:
    """Structural spans eligible for UF: length >= 2, whole sentence excluded."""
    n = t.j - t.i + 1
    out: Counter = Counter()
    for node in t.iter_nodes():
        if node.is_leaf:
            continue
        if (node.i, node.j) == (t.i, t.j) and node.j - node.i + 1 == n:
            continue
        out[(node.i, node.j)] += 1
    return out


def unlabeled_f1(gold: BinaryNode, pred: BinaryNode) -> tuple[float, bool]:
    """UF for one sentence; the flag marks the no-eligible-spans degenerate case."""
    if gold.j - gold.i != pred.j - pred.i:
        raise LengthMismatch(gold.j - gold.i + 1, pred.j - pred.i + 1)
    gs = unlabeled_spans(gold)
    ps = unlabeled_spans(pred)
    if not gs and not ps:
        return 1.0, True
    if not gs or not ps:
        return 0.0, True
    return _prf_counts(sum((gs & ps).values()), sum(gs.values()), sum(ps.values()))[2], False


@dataclass
class EvalReport:
    n_sentences: int = 0
    match: int = 0
    n_gold: int = 0
    n_pred: int = 0
    exact: int = 0
    uf_match: int = 0
    uf_gold: int = 0
    uf_pred: int = 0
    has_uf: bool = False

    @property
    def lp(self) -> float:
        return _prf_counts(self.match, self.n_gold, self.n_pred)[0]

    @property
    def lr(self) -> float:
        return _prf_counts(self.match, self.n_gold, self.n_pred)[1]

    @property
    def lf(self) -> float:
        return _prf_counts(self.match, self.n_gold, self.n_pred)[2]

    @property
    def uf(self) -> float:
        return _prf_counts(self.uf_match, self.uf_gold, self.uf_pred)[2]

    @property
    def exact_rate(self) -> float:
        return self.exact / self.n_sentences if self.n_sentences else 0.0

    def format(self) -> str:
        lines = [
            f"sentences      {self.n_sentences}",
            f"LP             {100.0 * self.lp:.2f}",
            f"LR             {100.0 * self.lr:.2f}",
            f"LF             {100.0 * self.lf:.2f}",
            f"exact match    {100.0 * self.exact_rate:.2f}",
        ]
        if self.has_uf:
            lines.append(f"UF             {100.0 * self.uf:.2f}")
        return "\n".join(lines)


def evaluate_trees(
    golds: Sequence[Tree],
    preds: Sequence[Tree],
    params: EvalParams = EvalParams(),
    gold_binary: Optional[Sequence[Optional[BinaryNode]]] = None,
    pred_binary: Optional[Sequence[Optional[BinaryNode]]] = None,
    per_sentence: Optional[list] = None,
) -> EvalReport:
    """Micro-averaged corpus scores; optional binary views add UF."""
    if len(golds) != len(preds):
        raise LengthMismatch(len(golds), len(preds))
    rep = EvalReport()
    for idx, (g, p) in enumerate(zip(golds, preds)):
        gb = labeled_brackets(g, params)
        pb = labeled_brackets(p, params)
        m = sum((gb & pb).values())
        rep.n_sentences += 1
        rep.match += m
        rep.n_gold += sum(gb.values())
        rep.n_pred += sum(pb.values())
        if gb == pb:
            rep.exact += 1
        if per_sentence is not None:
            sp, sr, sf = _prf_counts(m, sum(gb.values()), sum(pb.values()))
            per_sentence.append(
                {"index": idx, "match": m, "gold": sum(gb.values()), "pred": sum(pb.values()),
                 "lp": sp, "lr": sr, "lf": sf}
            )
        if gold_binary is not None and pred_binary is not None:
            gt, pt = gold_binary[idx], pred_binary[idx]
            if gt is not None and pt is not None:
                gs = unlabeled_spans(gt)
                ps = unlabeled_spans(pt)
                rep.has_uf = True
                rep.uf_match += sum((gs & ps).values())
                rep.uf_gold += sum(gs.values())
                rep.uf_pred += sum(ps.values())
    return rep
