"""Parameter registry, initializers, and the shared LSTM step."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from . import tensor as T
from .tensor import Tensor


class ParamSet:
    """Named registry of trainable tensors with a fixed insertion order.

    Insertion order doubles as the serialization order, so two models built
    from the same config enumerate identically.
    """

    def __init__(self, dtype=np.float32):
        self.dtype = np.dtype(dtype)
        self._params: dict[str, Tensor] = {}
        self._trainable: dict[str, bool] = {}

    def add(self, name: str, data: np.ndarray, trainable: bool = True) -> Tensor:
        if name in self._params:
            raise ValueError(f"duplicate parameter {name!r}")
        t = Tensor(np.asarray(data, dtype=self.dtype))
        self._params[name] = t
        self._trainable[name] = trainable
        return t

    def matrix(self, name: str, rows: int, cols: int, rng: np.random.Generator) -> Tensor:
        # Glorot-style uniform init
        bound = np.sqrt(6.0 / (rows + cols))
        return self.add(name, rng.uniform(-bound, bound, size=(rows, cols)))

    def bias(self, name: str, size) -> Tensor:
        return self.add(name, np.zeros(size if isinstance(size, tuple) else (size,)))

    def embedding(self, name: str, rows: int, cols: int, rng: np.random.Generator) -> Tensor:
        return self.add(name, rng.normal(0.0, 0.01, size=(rows, cols)))

    def __getitem__(self, name: str) -> Tensor:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __len__(self) -> int:
        return len(self._params)

    def items(self) -> Iterator[tuple[str, Tensor]]:
        return iter(self._params.items())

    def trainable_items(self) -> list[tuple[str, Tensor]]:
        return [(n, p) for n, p in self._params.items() if self._trainable[n]]

    def set_trainable(self, name: str, flag: bool) -> None:
        self._trainable[name] = flag

    def zero_grads(self) -> None:
        for p in self._params.values():
            p.zero_grad()

    def n_values(self) -> int:
        return sum(p.data.size for p in self._params.values())


@dataclass
class LSTMParams:
    """One direction of one layer; gates packed as [i; f; g; o]."""

    wx: Tensor
    wh: Tensor
    b: Tensor
    hidden: int


def lstm_params(ps: ParamSet, prefix: str, input_dim: int, hidden: int, rng) -> LSTMParams:
    return LSTMParams(
        wx=ps.matrix(f"{prefix}.Wx", 4 * hidden, input_dim, rng),
        wh=ps.matrix(f"{prefix}.Wh", 4 * hidden, hidden, rng),
        b=ps.bias(f"{prefix}.b", 4 * hidden),
        hidden=hidden,
    )


def lstm_step(p: LSTMParams, x: Tensor, h: Tensor, c: Tensor) -> tuple[Tensor, Tensor]:
    z = T.add(T.affine(p.wx, x, p.b), T.matvec(p.wh, h))
    hdim = p.hidden
    i = T.sigmoid(T.narrow(z, 0, hdim))
    f = T.sigmoid(T.narrow(z, hdim, 2 * hdim))
    g = T.tanh(T.narrow(z, 2 * hdim, 3 * hdim))
    o = T.sigmoid(T.narrow(z, 3 * hdim, 4 * hdim))
    c2 = T.add(T.mul(f, c), T.mul(i, g))
    h2 = T.mul(o, T.tanh(c2))
    return h2, c2


def run_lstm(p: LSTMParams, xs: list[Tensor], reverse: bool = False) -> list[Tensor]:
    """Hidden states aligned with the input positions."""
    dtype = xs[0].dtype
    h = T.zeros((p.hidden,), dtype)
    c = T.zeros((p.hidden,), dtype)
    order = range(len(xs) - 1, -1, -1) if reverse else range(len(xs))
    out: list[Optional[Tensor]] = [None] * len(xs)
    for t in order:
        h, c = lstm_step(p, xs[t], h, c)
        out[t] = h
    return out  # type: ignore[return-value]


def maybe_dropout(x: Tensor, rate: float, rng: Optional[np.random.Generator], train: bool) -> Tensor:
    if not train or rate <= 0.0:
        return x
    assert rng is not None
    return T.dropout(x, rate, rng)
