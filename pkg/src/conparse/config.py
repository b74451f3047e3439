"""Dataclass configs and the key=value config-file format."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .errors import ConfigError

VARIANTS = ("binary-span", "multi-span", "linear-rule", "biaffine-rule")


@dataclass
class ModelConfig:
    """Architecture hyper-parameters (English-scale defaults)."""

    variant: str = "binary-span"
    word_dim: int = 100
    pos_dim: int = 32
    char_dim: int = 20
    char_hidden: int = 25
    hidden: int = 200  # word-LSTM units per direction
    layers: int = 2
    tree_hidden: int = 200
    label_dim: int = 32
    label_hidden: int = 200
    out_hidden: int = 128
    proj_dim: int = 128  # rule-model projection size
    dropout: float = 0.5
    chain_cap: int = 4
    unk_mode: str = "english"

    @property
    def input_dim(self) -> int:
        return self.word_dim + self.pos_dim

    def validate(self) -> None:
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}; pick one of {VARIANTS}")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError("dropout must be in [0, 1)")
        if self.unk_mode not in ("english", "chinese"):
            raise ConfigError("unk_mode must be english or chinese")


@dataclass
class TrainConfig:
    lr0: float = 0.1
    decay: float = 0.05
    decay_mode: str = "inverse"  # inverse: lr0/(1+decay*epoch); multiplicative: lr0*(1-decay)^epoch
    l2: float = 1e-6
    max_epochs: int = 50
    eval_every: int = 10000
    patience: int = 20
    seed: int = 1
    gamma: float = 0.8375  # 0 disables stochastic unknown-word replacement
    min_count: int = 1
    clip_norm: float = 5.0  # 0 disables clipping
    pretrained: str = ""
    freeze_pretrained: bool = False
    heads: str = ""  # optional head-rule table path

    def validate(self) -> None:
        if self.lr0 <= 0 or self.decay < 0:
            raise ConfigError("learning rate must be positive and decay non-negative")
        if self.patience < 1:
            raise ConfigError("patience must be at least 1")
        if self.max_epochs < 1 or self.eval_every < 1:
            raise ConfigError("max_epochs and eval_every must be at least 1")
        if self.decay_mode not in ("inverse", "multiplicative"):
            raise ConfigError("decay_mode must be inverse or multiplicative")
        if self.gamma < 0:
            raise ConfigError("gamma must be non-negative")


def _coerce(name: str, raw: str, typ) -> object:
    try:
        if typ is bool:
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return typ(raw)
    except ValueError as e:
        raise ConfigError(f"bad value for {name}: {raw!r}") from e


def parse_config_text(text: str) -> tuple[ModelConfig, TrainConfig]:
    """Parse the flat key=value format (# starts a comment)."""
    mfields = {f.name for f in dataclasses.fields(ModelConfig)}
    tfields = {f.name for f in dataclasses.fields(TrainConfig)}
    mcfg = ModelConfig()
    tcfg = TrainConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key in mfields:
            setattr(mcfg, key, _coerce(key, val, type(getattr(mcfg, key))))
        elif key in tfields:
            setattr(tcfg, key, _coerce(key, val, type(getattr(tcfg, key))))
        else:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
    mcfg.validate()
    tcfg.validate()
    return mcfg, tcfg


def load_config(path: str) -> tuple[ModelConfig, TrainConfig]:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
