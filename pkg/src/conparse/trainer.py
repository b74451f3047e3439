"""Joint SGD training with stochastic unknown-word replacement, inverse-time
learning-rate decay, L2, gradient clipping, and LF-driven early stopping.

All randomness in an epoch (shuffle, unk replacement, dropout masks) flows
from a generator seeded with (seed, epoch), so runs with equal seeds are
bit-reproducible and training can resume at epoch granularity.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import tensor as T
from .config import ModelConfig, TrainConfig
from .encoder import load_pretrained_embeddings, tokens_for_sentence
from .errors import ChainTooLong, DataError, NonFiniteGradient
from .metrics import EvalParams, evaluate_trees
from .model_io import save_model
from .nn import ParamSet
from .parser import ParserModel
from .tensor import Tape, Tensor, backward
from .trees import (
    BinaryNode,
    HeadTable,
    Tree,
    binarize,
    collapse_unary,
    default_head_table,
    leaves,
)
from .vocab import build_vocab, stochastic_unk


@dataclass
class TrainState:
    epoch: int = 0
    examples_seen: int = 0
    best_dev_lf: float = -1.0
    evals_since_best: int = 0

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainState":
        return cls(
            epoch=int(d.get("epoch", 0)),
            examples_seen=int(d.get("examples_seen", 0)),
            best_dev_lf=float(d.get("best_dev_lf", -1.0)),
            evals_since_best=int(d.get("evals_since_best", 0)),
        )


def learning_rate(cfg: TrainConfig, epoch: int) -> float:
    if cfg.decay_mode == "multiplicative":
        return cfg.lr0 * (1.0 - cfg.decay) ** epoch
    return cfg.lr0 / (1.0 + cfg.decay * epoch)


def l2_term(params: ParamSet, coef: float) -> Optional[Tensor]:
    """(coef / 2) * ||theta||^2 over all trainable parameters."""
    if coef <= 0:
        return None
    parts = [T.sumsq(p) for _, p in params.trainable_items()]
    return T.scale(T.add_n(parts), coef / 2.0)


def joint_loss(
    model: ParserModel,
    tokens,
    gold: BinaryNode,
    l2: float,
    train: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> tuple[Tensor, dict[str, int]]:
    loss, counters = model.data_loss(tokens, gold, train, rng)
    reg = l2_term(model.params, l2)
    if reg is not None:
        loss = T.add(loss, reg)
    return loss, counters


def sgd_step(params: ParamSet, lr: float, clip_norm: float = 0.0) -> None:
    """theta <- theta - lr * g; optional global-norm clipping beforehand."""
    if lr <= 0:
        raise ValueError("learning rate must be positive")
    items = [(n, p) for n, p in params.trainable_items() if p.grad is not None]
    for name, p in items:
        if not np.all(np.isfinite(p.grad)):
            raise NonFiniteGradient(name)
    scale = 1.0
    if clip_norm > 0:
        total = float(sum(float((p.grad * p.grad).sum()) for _, p in items))
        norm = np.sqrt(total)
        if norm > clip_norm:
            scale = clip_norm / norm
    for _, p in items:
        p.data -= (lr * scale) * p.grad.astype(p.data.dtype)


@dataclass
class Example:
    words: list[str]
    tags: list[str]
    gold_tree: Tree
    gold_binary: BinaryNode


def prepare_examples(
    trees: Sequence[Tree], heads: HeadTable, cap: int
) -> tuple[list[Example], int]:
    """Collapse and binarize gold trees; ChainTooLong trees are skipped."""
    out: list[Example] = []
    skipped = 0
    for t in trees:
        try:
            collapsed = collapse_unary(t, cap=cap)
        except ChainTooLong:
            skipped += 1
            continue
        lv = leaves(t)
        out.append(
            Example(
                words=[l.word for l in lv],
                tags=[l.pos for l in lv],
                gold_tree=t,
                gold_binary=binarize(collapsed, heads),
            )
        )
    return out, skipped


def evaluate_model(
    model: ParserModel, examples: Sequence[Example], params: EvalParams = EvalParams()
):
    preds = []
    pred_binary = []
    for ex in examples:
        tree, btree = model.parse_tokens(ex.words, ex.tags)
        preds.append(tree)
        pred_binary.append(btree)
    return evaluate_trees(
        [ex.gold_tree for ex in examples],
        preds,
        params,
        gold_binary=[ex.gold_binary for ex in examples],
        pred_binary=pred_binary,
    )


def train_loop(
    model_cfg: ModelConfig,
    train_cfg: TrainConfig,
    train_trees: Sequence[Tree],
    dev_trees: Sequence[Tree],
    out_path: Optional[str] = None,
    resume: Optional[tuple[ParserModel, TrainState]] = None,
    on_log: Optional[Callable[[str], None]] = None,
) -> tuple[ParserModel, TrainState, list[str]]:
    """Train until patience runs out or max_epochs; returns the best model.

    Development LF is evaluated every eval_every examples; the checkpoint at
    out_path is rewritten whenever it improves.
    """
    model_cfg.validate()
    train_cfg.validate()
    if not train_trees or not dev_trees:
        raise DataError("training and development corpora must be non-empty")
    heads = (
        HeadTable.load(train_cfg.heads) if train_cfg.heads else default_head_table()
    )
    train_examples, n_skipped = prepare_examples(train_trees, heads, model_cfg.chain_cap)
    if not train_examples:
        raise DataError("no training tree fits the unary chain cap")
    dev_examples, _dev_skipped = prepare_examples(dev_trees, heads, model_cfg.chain_cap)

    log: list[str] = []

    def emit(line: str) -> None:
        log.append(line)
        if on_log is not None:
            on_log(line)

    if resume is not None:
        model, state = resume
        start_epoch = state.epoch + 1
    else:
        collapsed = [collapse_unary(ex.gold_tree, cap=model_cfg.chain_cap) for ex in train_examples]
        vocab = build_vocab(collapsed, min_count=train_cfg.min_count, mode=model_cfg.unk_mode)
        model = ParserModel(model_cfg, vocab, seed=train_cfg.seed)
        state = TrainState()
        start_epoch = 0
        if train_cfg.pretrained:
            n = load_pretrained_embeddings(train_cfg.pretrained, vocab, model.encoder.e_word)
            emit(f"pretrained_loaded={n}")
            if train_cfg.freeze_pretrained:
                model.params.set_trainable("enc.E_word", False)
    if n_skipped:
        emit(f"skipped_chain_too_long={n_skipped}")

    best_snapshot: Optional[dict[str, np.ndarray]] = None

    def checkpoint() -> None:
        nonlocal best_snapshot
        best_snapshot = {name: p.data.copy() for name, p in model.params.items()}
        if out_path is not None:
            save_model(out_path, model, state.to_dict())

    window_loss = 0.0
    window_count = 0
    stop = False
    for epoch in range(start_epoch, train_cfg.max_epochs):
        state.epoch = epoch
        rng = np.random.default_rng([train_cfg.seed, epoch])
        lr = learning_rate(train_cfg, epoch)
        order = rng.permutation(len(train_examples))
        for idx in order:
            ex = train_examples[int(idx)]
            if train_cfg.gamma > 0:
                forms = stochastic_unk(ex.words, model.vocab, train_cfg.gamma, rng)
            else:
                forms = ex.words
            tokens = tokens_for_sentence(ex.words, ex.tags, model.vocab, word_forms=forms)
            model.params.zero_grads()
            with Tape() as tape:
                loss, _ = joint_loss(model, tokens, ex.gold_binary, train_cfg.l2, True, rng)
            backward(loss, tape)
            sgd_step(model.params, lr, train_cfg.clip_norm)
            window_loss += float(loss.data)
            window_count += 1
            state.examples_seen += 1
            if state.examples_seen % train_cfg.eval_every == 0:
                report = evaluate_model(model, dev_examples)
                lf = report.lf * 100.0
                improved = lf > state.best_dev_lf
                if improved:
                    state.best_dev_lf = lf
                    state.evals_since_best = 0
                else:
                    state.evals_since_best += 1
                avg = window_loss / max(window_count, 1)
                emit(
                    f"epoch={epoch} examples={state.examples_seen} lr={lr:.6f} "
                    f"train_loss={avg:.6f} dev_lp={report.lp * 100.0:.2f} "
                    f"dev_lr={report.lr * 100.0:.2f} dev_lf={lf:.2f} best={state.best_dev_lf:.2f}"
                )
                window_loss = 0.0
                window_count = 0
                if improved:
                    checkpoint()
                if state.evals_since_best >= train_cfg.patience:
                    emit(f"early_stop after {state.evals_since_best} stale evaluations")
                    stop = True
                    break
        if stop:
            break

    if best_snapshot is None:
        checkpoint()
    else:
        for name, p in model.params.items():
            p.data = best_snapshot[name].copy()
    return model, state, log
