"""Command-line entry points: train, parse, eval, inspect.

Exit codes: 0 success, 1 total parse failure, 2 config error, 3 data error,
4 gold/pred count mismatch, 5 corrupt model file.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Optional

from .chart import dump_chart
from .config import VARIANTS, ModelConfig, TrainConfig, load_config
from .errors import ConfigError, ConparseError, DataError, ModelFormatError
from .metrics import EvalParams, evaluate_trees
from .model_io import load_model, save_model
from .parser import ParserModel
from .trainer import TrainState, prepare_examples, train_loop
from .trees import default_head_table, read_trees, render

EXIT_OK = 0
EXIT_ALL_FAILED = 1
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_COUNT = 4
EXIT_MODEL = 5


def _read_corpus(path: str):
    try:
        trees = read_trees(path)
    except OSError as e:
        raise DataError(f"cannot read {path}: {e}") from e
    except ConparseError as e:
        raise DataError(f"cannot parse trees in {path}: {e}") from e
    if not trees:
        raise DataError(f"no trees in {path}")
    return trees


def cmd_train(args: argparse.Namespace) -> int:
    try:
        if args.config:
            model_cfg, train_cfg = load_config(args.config)
        else:
            model_cfg, train_cfg = ModelConfig(), TrainConfig()
        if args.variant:
            model_cfg.variant = args.variant
        if args.seed is not None:
            train_cfg.seed = args.seed
        model_cfg.validate()
        train_cfg.validate()
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        train_trees = _read_corpus(args.train)
        dev_trees = _read_corpus(args.dev)
    except DataError as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    resume = None
    if args.resume:
        try:
            model, state_dict = load_model(args.resume)
        except ModelFormatError as e:
            print(f"model error: {e}", file=sys.stderr)
            return EXIT_MODEL
        resume = (model, TrainState.from_dict(state_dict))
    log_path = args.model + ".log"
    with open(log_path, "w", encoding="utf-8") as log_fh:

        def emit(line: str) -> None:
            log_fh.write(line + "\n")
            if not args.quiet:
                print(line, file=sys.stderr)

        try:
            model, state, _ = train_loop(
                model_cfg, train_cfg, train_trees, dev_trees, out_path=args.model, on_log=emit
            )
        except DataError as e:
            print(f"data error: {e}", file=sys.stderr)
            return EXIT_DATA
    save_model(args.model, model, state.to_dict())
    return EXIT_OK


def _split_token(tok: str) -> Optional[tuple[str, str]]:
    cut = tok.rfind("_")
    if cut <= 0 or cut == len(tok) - 1:
        return None
    return tok[:cut], tok[cut + 1 :]


def cmd_parse(args: argparse.Namespace) -> int:
    try:
        model, _state = load_model(args.model)
    except ModelFormatError as e:
        print(f"model error: {e}", file=sys.stderr)
        return EXIT_MODEL
    try:
        with open(args.input, encoding="utf-8") as fh:
            lines = [line.strip() for line in fh]
    except OSError as e:
        print(f"data error: cannot read {args.input}: {e}", file=sys.stderr)
        return EXIT_DATA
    lines = [line for line in lines if line]
    n_ok = 0
    started = time.perf_counter()
    for line in lines:
        pairs = [_split_token(tok) for tok in line.split()]
        if not pairs or any(p is None for p in pairs):
            print("(())")
            continue
        words = [p[0] for p in pairs]  # type: ignore[index]
        tags = [p[1] for p in pairs]  # type: ignore[index]
        try:
            if args.dump_chart:
                tree, _btree, source = model.parse_tokens(words, tags, return_source=True)
                if source is not None:
                    sys.stderr.write(dump_chart(source))
            else:
                tree, _btree = model.parse_tokens(words, tags)
        except ConparseError:
            print("(())")
            continue
        print(render(tree))
        n_ok += 1
    elapsed = time.perf_counter() - started
    if lines and elapsed > 0:
        print(f"parsed {n_ok}/{len(lines)} sentences, {len(lines) / elapsed:.2f} sents/s", file=sys.stderr)
    if lines and n_ok == 0:
        return EXIT_ALL_FAILED
    return EXIT_OK


def _load_eval_params(path: Optional[str], strict: bool) -> EvalParams:
    if strict:
        return EvalParams.strict()
    if path is None:
        return EvalParams()
    delete: set[str] = set()
    exclude: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "delete":
                delete.update(parts[1:])
            elif parts[0] == "exclude-root":
                exclude.update(parts[1:])
            else:
                raise ConfigError(f"{path}:{lineno}: unknown directive {parts[0]!r}")
    return EvalParams(delete_pos=frozenset(delete), exclude_root_labels=frozenset(exclude))


def cmd_eval(args: argparse.Namespace) -> int:
    try:
        params = _load_eval_params(args.eval_params, args.strict_eval)
    except (ConfigError, OSError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        gold = _read_corpus(args.gold)
        pred = _read_corpus(args.pred)
    except DataError as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    if len(gold) != len(pred):
        print(f"count mismatch: {len(gold)} gold vs {len(pred)} predicted", file=sys.stderr)
        return EXIT_COUNT
    heads = default_head_table()
    gold_ex, _ = prepare_examples(gold, heads, cap=64)
    pred_ex, _ = prepare_examples(pred, heads, cap=64)
    gold_binary = [ex.gold_binary for ex in gold_ex] if len(gold_ex) == len(gold) else None
    pred_binary = [ex.gold_binary for ex in pred_ex] if len(pred_ex) == len(pred) else None
    per_sentence: Optional[list] = [] if args.per_sentence else None
    report = evaluate_trees(
        gold,
        pred,
        params,
        gold_binary=gold_binary if pred_binary else None,
        pred_binary=pred_binary if gold_binary else None,
        per_sentence=per_sentence,
    )
    print(report.format())
    if per_sentence is not None:
        for rec in per_sentence:
            print(
                f"sent index={rec['index']} match={rec['match']} gold={rec['gold']} "
                f"pred={rec['pred']} lf={100.0 * rec['lf']:.2f}"
            )
    return EXIT_OK


def cmd_inspect(args: argparse.Namespace) -> int:
    try:
        model, state = load_model(args.model)
    except ModelFormatError as e:
        print(f"model error: {e}", file=sys.stderr)
        return EXIT_MODEL
    v = model.vocab
    print(f"variant         {model.cfg.variant}")
    print(f"words           {v.n_words}")
    print(f"chars           {v.n_chars}")
    print(f"pos             {v.n_pos}")
    print(f"labels          {v.n_labels}")
    print(f"parameters      {model.params.n_values()}")
    if state:
        print(f"state           {state}")
    for name, p in model.params.items():
        print(f"  {name}  {tuple(p.data.shape)}")
    return EXIT_OK


def build_argparser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="conparse", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a parser and write the best checkpoint")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--train", required=True, help="training treebank (bracketed)")
    p.add_argument("--dev", required=True, help="development treebank (bracketed)")
    p.add_argument("--model", required=True, help="output model path")
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--seed", type=int)
    p.add_argument("--resume", help="checkpoint to resume from")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("parse", help="parse word_POS lines into bracketed trees")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--dump-chart", action="store_true")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("eval", help="bracketing evaluation of predicted trees")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--eval-params", help="evaluation parameter file")
    p.add_argument("--strict-eval", action="store_true", help="delete nothing")
    p.add_argument("--per-sentence", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("inspect", help="print a model file summary")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_inspect)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_argparser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
