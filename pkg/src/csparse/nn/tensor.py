"""Reverse-mode autodiff over dense float64 arrays.

A :class:`Tensor` wraps a numpy array plus the bookkeeping needed to
backpropagate: parent tensors and a closure that pushes the incoming
gradient to them.  Graphs are built eagerly by the ops below and torn
down with the Python garbage collector once a step's update is done;
only :class:`Parameter` values (and their gradient buffers) persist
between steps.  Everything runs in float64 so finite-difference checks
have headroom.
"""

from __future__ import annotations

import numpy as np


class Tensor:
    __slots__ = ("value", "grad", "_parents", "_backward")

    def __init__(self, value, parents=(), backward=None):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = None
        self._parents = parents
        self._backward = backward

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        return f"Tensor(shape={self.value.shape})"


class Parameter(Tensor):
    """A trainable tensor; keeps an accumulating gradient buffer."""

    def __init__(self, value):
        super().__init__(value)
        self.grad = np.zeros_like(self.value)

    def zero_grad(self):
        self.grad.fill(0.0)


def _ensure_grad(t: Tensor):
    if t.grad is None:
        t.grad = np.zeros_like(t.value)


def backward(loss: Tensor):
    """Backpropagate from a scalar loss through the recorded graph."""
    if loss.value.shape != ():
        raise ValueError(f"backward needs a scalar, got shape {loss.value.shape}")
    order: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if id(parent) not in seen:
                stack.append((parent, False))
    for node in order:
        _ensure_grad(node)
    loss.grad = np.ones_like(loss.value)
    for node in reversed(order):
        if node._backward is not None:
            node._backward(node.grad)


def constant(value) -> Tensor:
    return Tensor(np.asarray(value, dtype=np.float64))


def add(a: Tensor, b: Tensor) -> Tensor:
    if a.value.shape != b.value.shape:
        raise ValueError(f"add shape mismatch: {a.value.shape} vs {b.value.shape}")

    def push(g):
        a.grad += g
        b.grad += g

    return Tensor(a.value + b.value, (a, b), push)


def add_n(tensors: list[Tensor]) -> Tensor:
    if not tensors:
        raise ValueError("add_n of empty list")
    out = np.zeros_like(tensors[0].value)
    for t in tensors:
        out = out + t.value

    def push(g):
        for t in tensors:
            t.grad += g

    return Tensor(out, tuple(tensors), push)


def mul(a: Tensor, b: Tensor) -> Tensor:
    if a.value.shape != b.value.shape:
        raise ValueError(f"mul shape mismatch: {a.value.shape} vs {b.value.shape}")

    def push(g):
        a.grad += g * b.value
        b.grad += g * a.value

    return Tensor(a.value * b.value, (a, b), push)


def scale(a: Tensor, s: float) -> Tensor:
    def push(g):
        a.grad += g * s

    return Tensor(a.value * s, (a,), push)


def mask_mul(a: Tensor, mask: np.ndarray) -> Tensor:
    """Multiply by a constant array (dropout masks, stacking masks)."""

    def push(g):
        a.grad += g * mask

    return Tensor(a.value * mask, (a,), push)


def matvec(A: Tensor, x: Tensor) -> Tensor:
    if A.value.ndim != 2 or x.value.ndim != 1 or A.value.shape[1] != x.value.shape[0]:
        raise ValueError(f"matvec shape mismatch: {A.value.shape} @ {x.value.shape}")

    def push(g):
        A.grad += np.outer(g, x.value)
        x.grad += A.value.T @ g

    return Tensor(A.value @ x.value, (A, x), push)


def matvec_t(A: Tensor, y: Tensor) -> Tensor:
    """A.T @ y for a (m, k) matrix and (m,) vector."""
    if A.value.ndim != 2 or y.value.ndim != 1 or A.value.shape[0] != y.value.shape[0]:
        raise ValueError(f"matvec_t shape mismatch: {A.value.shape}.T @ {y.value.shape}")

    def push(g):
        A.grad += np.outer(y.value, g)
        y.grad += A.value @ g

    return Tensor(A.value.T @ y.value, (A, y), push)


def dot(a: Tensor, b: Tensor) -> Tensor:
    if a.value.shape != b.value.shape or a.value.ndim != 1:
        raise ValueError(f"dot shape mismatch: {a.value.shape} vs {b.value.shape}")

    def push(g):
        a.grad += g * b.value
        b.grad += g * a.value

    return Tensor(a.value @ b.value, (a, b), push)


def tanh(x: Tensor) -> Tensor:
    out = np.tanh(x.value)

    def push(g):
        x.grad += g * (1.0 - out * out)

    return Tensor(out, (x,), push)


def sigmoid(x: Tensor) -> Tensor:
    out = 1.0 / (1.0 + np.exp(-x.value))

    def push(g):
        x.grad += g * out * (1.0 - out)

    return Tensor(out, (x,), push)


def concat(tensors: list[Tensor]) -> Tensor:
    sizes = [t.value.shape[0] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def push(g):
        for t, lo, hi in zip(tensors, offsets[:-1], offsets[1:]):
            t.grad += g[lo:hi]

    return Tensor(np.concatenate([t.value for t in tensors]), tuple(tensors), push)


def stack_rows(vectors: list[Tensor]) -> Tensor:
    def push(g):
        for i, v in enumerate(vectors):
            v.grad += g[i]

    return Tensor(np.stack([v.value for v in vectors]), tuple(vectors), push)


def softmax(x: Tensor) -> Tensor:
    shifted = x.value - x.value.max()
    ex = np.exp(shifted)
    out = ex / ex.sum()

    def push(g):
        x.grad += out * (g - np.dot(g, out))

    return Tensor(out, (x,), push)


def softmax_xent(logits: Tensor, gold: int) -> Tensor:
    """Cross-entropy of a softmax over ``logits`` against class ``gold``."""
    n = logits.value.shape[0]
    if not 0 <= gold < n:
        raise IndexError(f"gold index {gold} out of range for {n} logits")
    shifted = logits.value - logits.value.max()
    logz = np.log(np.exp(shifted).sum())
    probs = np.exp(shifted - logz)
    loss = logz - shifted[gold]

    def push(g):
        delta = probs.copy()
        delta[gold] -= 1.0
        logits.grad += g * delta

    return Tensor(loss, (logits,), push)


def log_softmax_values(logits: np.ndarray) -> np.ndarray:
    """Inference-only stable log-softmax on a raw array."""
    shifted = logits - logits.max()
    return shifted - np.log(np.exp(shifted).sum())
