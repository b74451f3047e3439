"""Dense tensors with reverse-mode automatic differentiation.

The engine is deliberately small: 1-D vectors and 2-D matrices backed by
numpy, a tape recording ops in creation order (which is a topological
order), and per-op backward closures. Tracing is controlled by the active
Tape context; forward values are identical with tracing on or off.

A Tape is single-threaded. Storage is float32 for training; grad_check
builds models in float64 and compares against central finite differences.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np

from .errors import NotScalar, ShapeMismatch


class Tape:
    """Recorded ops, in an order where every parent precedes its consumer."""

    def __init__(self) -> None:
        self.nodes: list[Tensor] = []

    def __enter__(self) -> "Tape":
        _ACTIVE.append(self)
        return self

    def __exit__(self, *exc) -> None:
        popped = _ACTIVE.pop()
        assert popped is self

    def __len__(self) -> int:
        return len(self.nodes)


_ACTIVE: list[Tape] = []


def active_tape() -> Optional[Tape]:
    return _ACTIVE[-1] if _ACTIVE else None


class Tensor:
    """A numpy array plus an optional position on the gradient tape."""

    __slots__ = ("data", "grad", "_parents", "_backward")

    def __init__(self, data: np.ndarray):
        self.data = data
        self.grad: Optional[np.ndarray] = None
        self._parents: tuple["Tensor", ...] = ()
        self._backward: Optional[Callable[[np.ndarray], None]] = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def _accum(self, g: np.ndarray) -> None:
        if self.grad is None:
            self.grad = g.copy()
        else:
            self.grad += g

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, dtype={self.data.dtype})"


def constant(data, dtype=np.float32) -> Tensor:
    return Tensor(np.asarray(data, dtype=dtype))


def zeros(shape, dtype=np.float32) -> Tensor:
    return Tensor(np.zeros(shape, dtype=dtype))


def _record(out: Tensor, parents: Sequence[Tensor], backward: Callable[[np.ndarray], None]) -> Tensor:
    tape = active_tape()
    if tape is not None:
        out._parents = tuple(parents)
        out._backward = backward
        tape.nodes.append(out)
    return out


# ---------------------------------------------------------------------------
# primitives


def add(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ShapeMismatch("add", (a.shape, b.shape))
    out = Tensor(a.data + b.data)

    def bwd(g):
        a._accum(g)
        b._accum(g)

    return _record(out, (a, b), bwd)


def sub(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ShapeMismatch("sub", (a.shape, b.shape))
    out = Tensor(a.data - b.data)

    def bwd(g):
        a._accum(g)
        b._accum(-g)

    return _record(out, (a, b), bwd)


def mul(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ShapeMismatch("mul", (a.shape, b.shape))
    out = Tensor(a.data * b.data)

    def bwd(g):
        a._accum(g * b.data)
        b._accum(g * a.data)

    return _record(out, (a, b), bwd)


def scale(a: Tensor, c: float) -> Tensor:
    out = Tensor(a.data * a.data.dtype.type(c))

    def bwd(g):
        a._accum(g * a.data.dtype.type(c))

    return _record(out, (a,), bwd)


def add_n(parts: Sequence[Tensor]) -> Tensor:
    if not parts:
        raise ShapeMismatch("add_n", ())
    shape = parts[0].shape
    for p in parts:
        if p.shape != shape:
            raise ShapeMismatch("add_n", [p.shape for p in parts])
    out = Tensor(np.sum([p.data for p in parts], axis=0).astype(parts[0].data.dtype))

    def bwd(g):
        for p in parts:
            p._accum(g)

    return _record(out, tuple(parts), bwd)


def matvec(w: Tensor, x: Tensor) -> Tensor:
    if w.data.ndim != 2 or x.data.ndim != 1 or w.shape[1] != x.shape[0]:
        raise ShapeMismatch("matvec", (w.shape, x.shape))
    out = Tensor(w.data @ x.data)

    def bwd(g):
        w._accum(np.outer(g, x.data))
        x._accum(w.data.T @ g)

    return _record(out, (w, x), bwd)


def matvec_t(w: Tensor, x: Tensor) -> Tensor:
    """w.T @ x with gradients into both operands."""
    if w.data.ndim != 2 or x.data.ndim != 1 or w.shape[0] != x.shape[0]:
        raise ShapeMismatch("matvec_t", (w.shape, x.shape))
    out = Tensor(w.data.T @ x.data)

    def bwd(g):
        w._accum(np.outer(x.data, g))
        x._accum(w.data @ g)

    return _record(out, (w, x), bwd)


def affine(w: Tensor, x: Tensor, b: Tensor) -> Tensor:
    if (
        w.data.ndim != 2
        or x.data.ndim != 1
        or w.shape[1] != x.shape[0]
        or b.shape != (w.shape[0],)
    ):
        raise ShapeMismatch("affine", (w.shape, x.shape, b.shape))
    out = Tensor(w.data @ x.data + b.data)

    def bwd(g):
        w._accum(np.outer(g, x.data))
        x._accum(w.data.T @ g)
        b._accum(g)

    return _record(out, (w, x, b), bwd)


def dot(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape or a.data.ndim != 1:
        raise ShapeMismatch("dot", (a.shape, b.shape))
    out = Tensor(np.asarray(a.data @ b.data))

    def bwd(g):
        a._accum(g * b.data)
        b._accum(g * a.data)

    return _record(out, (a, b), bwd)


def concat(parts: Sequence[Tensor]) -> Tensor:
    for p in parts:
        if p.data.ndim != 1:
            raise ShapeMismatch("concat", [p.shape for p in parts])
    out = Tensor(np.concatenate([p.data for p in parts]))
    offsets = np.cumsum([0] + [p.shape[0] for p in parts])

    def bwd(g):
        for p, lo, hi in zip(parts, offsets[:-1], offsets[1:]):
            p._accum(g[lo:hi])

    return _record(out, tuple(parts), bwd)


def narrow(x: Tensor, start: int, stop: int) -> Tensor:
    if x.data.ndim != 1 or not (0 <= start <= stop <= x.shape[0]):
        raise ShapeMismatch("narrow", (x.shape, (start, stop)))
    out = Tensor(x.data[start:stop].copy())

    def bwd(g):
        full = np.zeros_like(x.data)
        full[start:stop] = g
        x._accum(full)

    return _record(out, (x,), bwd)


def stack(parts: Sequence[Tensor]) -> Tensor:
    """Gather scalar tensors into one vector."""
    for p in parts:
        if p.data.size != 1:
            raise ShapeMismatch("stack", [p.shape for p in parts])
    out = Tensor(np.array([p.data.reshape(()) for p in parts], dtype=parts[0].data.dtype))

    def bwd(g):
        for i, p in enumerate(parts):
            p._accum(np.asarray(g[i]).reshape(p.data.shape))

    return _record(out, tuple(parts), bwd)


def lookup(table: Tensor, idx: int) -> Tensor:
    if table.data.ndim != 2 or not (0 <= idx < table.shape[0]):
        raise ShapeMismatch("lookup", (table.shape, idx))
    out = Tensor(table.data[idx].copy())

    def bwd(g):
        if table.grad is None:
            table.grad = np.zeros_like(table.data)
        table.grad[idx] += g

    return _record(out, (table,), bwd)


def tanh(x: Tensor) -> Tensor:
    y = np.tanh(x.data)
    out = Tensor(y)

    def bwd(g):
        x._accum(g * (1.0 - y * y))

    return _record(out, (x,), bwd)


def sigmoid(x: Tensor) -> Tensor:
    y = 1.0 / (1.0 + np.exp(-x.data))
    out = Tensor(y.astype(x.data.dtype))

    def bwd(g):
        x._accum(g * (y * (1.0 - y)))

    return _record(out, (x,), bwd)


def elu(x: Tensor) -> Tensor:
    """ELU with alpha = 1."""
    y = np.where(x.data > 0, x.data, np.expm1(x.data)).astype(x.data.dtype)
    out = Tensor(y)

    def bwd(g):
        x._accum(g * np.where(x.data > 0, 1.0, y + 1.0).astype(x.data.dtype))

    return _record(out, (x,), bwd)


def log(x: Tensor) -> Tensor:
    out = Tensor(np.log(x.data))

    def bwd(g):
        x._accum(g / x.data)

    return _record(out, (x,), bwd)


def softmax(x: Tensor) -> Tensor:
    if x.data.ndim != 1:
        raise ShapeMismatch("softmax", (x.shape,))
    z = x.data - np.max(x.data)
    e = np.exp(z)
    y = e / e.sum()
    out = Tensor(y.astype(x.data.dtype))

    def bwd(g):
        x._accum((y * (g - np.dot(g, y))).astype(x.data.dtype))

    return _record(out, (x,), bwd)


def pickneglogsoftmax(x: Tensor, idx: int) -> Tensor:
    """-log softmax(x)[idx], stably."""
    if x.data.ndim != 1 or not (0 <= idx < x.shape[0]):
        raise ShapeMismatch("pickneglogsoftmax", (x.shape, idx))
    z = x.data - np.max(x.data)
    logz = np.log(np.sum(np.exp(z)))
    out = Tensor(np.asarray(logz - z[idx], dtype=x.data.dtype))
    sm = np.exp(z - logz)

    def bwd(g):
        d = sm * g
        d[idx] -= g
        x._accum(d.astype(x.data.dtype))

    return _record(out, (x,), bwd)


def sum_(x: Tensor) -> Tensor:
    out = Tensor(np.asarray(x.data.sum(), dtype=x.data.dtype))

    def bwd(g):
        x._accum(np.full_like(x.data, g))

    return _record(out, (x,), bwd)


def sumsq(x: Tensor) -> Tensor:
    out = Tensor(np.asarray((x.data * x.data).sum(), dtype=x.data.dtype))

    def bwd(g):
        x._accum(2.0 * g * x.data)

    return _record(out, (x,), bwd)


def dropout(x: Tensor, rate: float, rng: np.random.Generator) -> Tensor:
    """Inverted-scaling dropout; call only in training mode."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if rate == 0.0:
        return x
    keep = (rng.random(x.shape) >= rate).astype(x.data.dtype)
    mask = keep / x.data.dtype.type(1.0 - rate)
    out = Tensor(x.data * mask)

    def bwd(g):
        x._accum(g * mask)

    return _record(out, (x,), bwd)


# ---------------------------------------------------------------------------
# backward pass and the finite-difference oracle


def backward(loss: Tensor, tape: Tape) -> None:
    """Populate .grad for everything reachable from the scalar loss."""
    if loss.data.size != 1:
        raise NotScalar(loss.shape)
    loss.grad = np.ones_like(loss.data)
    for node in reversed(tape.nodes):
        if node.grad is not None and node._backward is not None:
            node._backward(node.grad)


def grad_check(
    f: Callable[[], Tensor],
    params: Sequence[tuple[str, Tensor]],
    eps: float = 1e-4,
    max_coords: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """Max relative error between analytic and central-difference gradients.

    f must be deterministic (dropout off) and is re-evaluated 2 times per
    checked coordinate; max_coords caps the coordinates sampled per
    parameter. The error denominator max(1, |a|, |fd|) compares coordinates
    below unit magnitude absolutely, so finite-difference noise on tiny
    gradients does not swamp the check.
    """
    for _, p in params:
        p.zero_grad()
    with Tape() as tape:
        loss = f()
    backward(loss, tape)
    analytic = {name: (np.zeros_like(p.data) if p.grad is None else p.grad.copy()) for name, p in params}

    worst = 0.0
    rng = rng or np.random.default_rng(0)
    for name, p in params:
        flat = p.data.reshape(-1)
        n = flat.shape[0]
        coords = np.arange(n)
        if max_coords is not None and n > max_coords:
            coords = rng.choice(n, size=max_coords, replace=False)
        for c in coords:
            orig = flat[c]
            flat[c] = orig + eps
            hi = float(f().data)
            flat[c] = orig - eps
            lo = float(f().data)
            flat[c] = orig
            fd = (hi - lo) / (2.0 * eps)
            an = float(analytic[name].reshape(-1)[c])
            err = abs(an - fd) / max(1.0, abs(an), abs(fd))
            worst = max(worst, err)
    return worst
