"""Layer zoo: embeddings, LSTM/Bi-LSTM, MLP, attention, dropout.

Layers hold :class:`Parameter` tensors and build graph nodes on every
call.  They expose ``named_params()`` so models can collect parameters
for optimizers and serialization under stable dotted names.
"""

from __future__ import annotations

import numpy as np

from .init import orthonormal_init, uniform_init, xavier_init
from .tensor import (
    Parameter,
    Tensor,
    add,
    concat,
    matvec,
    matvec_t,
    mul,
    sigmoid,
    softmax,
    tanh,
)

# Gate packing order inside LSTM weight matrices.
_GATES = ("input", "forget", "output", "candidate")


class Layer:
    def named_params(self, prefix: str = ""):
        for name, value in vars(self).items():
            if isinstance(value, Parameter):
                yield f"{prefix}{name}", value
            elif isinstance(value, Layer):
                yield from value.named_params(f"{prefix}{name}.")
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Parameter):
                        yield f"{prefix}{name}.{i}", item
                    elif isinstance(item, Layer):
                        yield from item.named_params(f"{prefix}{name}.{i}.")

    def params(self) -> list[Parameter]:
        return [p for _, p in self.named_params()]


class Embedding(Layer):
    """Lookup table with scatter-add gradients.

    Rows default to uniform [-0.1, 0.1]; pass ``table`` to start from
    pretrained vectors.
    """

    def __init__(self, vocab_size: int, dim: int, rng, table: np.ndarray | None = None):
        if table is not None:
            if table.shape != (vocab_size, dim):
                raise ValueError(f"table shape {table.shape} != ({vocab_size}, {dim})")
            self.table = Parameter(np.array(table, dtype=np.float64))
        else:
            self.table = Parameter(uniform_init((vocab_size, dim), rng))
        self.dim = dim

    def __call__(self, index: int) -> Tensor:
        table = self.table
        row = table.value[index]

        def push(g):
            table.grad[index] += g

        return Tensor(row, (table,), push)


class Lstm(Layer):
    """Single LSTM cell (no peepholes), gates packed [i; f; o; g].

    Recurrent and input weights are per-gate orthonormal; the forget-gate
    bias starts at 1.0 to keep early memory open.
    """

    def __init__(self, input_dim: int, hidden_dim: int, rng):
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        self.w_in = Parameter(
            np.vstack([orthonormal_init(hidden_dim, input_dim, rng) for _ in _GATES])
        )
        self.w_rec = Parameter(
            np.vstack([orthonormal_init(hidden_dim, hidden_dim, rng) for _ in _GATES])
        )
        bias = np.zeros(4 * hidden_dim)
        bias[hidden_dim : 2 * hidden_dim] = 1.0
        self.bias = Parameter(bias)

    def initial_state(self) -> tuple[Tensor, Tensor]:
        zeros = np.zeros(self.hidden_dim)
        return Tensor(zeros), Tensor(zeros.copy())

    def step(self, x: Tensor, state: tuple[Tensor, Tensor]) -> tuple[Tensor, Tensor]:
        h_prev, c_prev = state
        if x.value.shape != (self.input_dim,):
            raise ValueError(f"lstm input shape {x.value.shape} != ({self.input_dim},)")
        hd = self.hidden_dim
        pre = add(add(matvec(self.w_in, x), matvec(self.w_rec, h_prev)), self.bias)
        gi = sigmoid(_slice(pre, 0, hd))
        gf = sigmoid(_slice(pre, hd, 2 * hd))
        go = sigmoid(_slice(pre, 2 * hd, 3 * hd))
        gc = tanh(_slice(pre, 3 * hd, 4 * hd))
        c = add(mul(gf, c_prev), mul(gi, gc))
        h = mul(go, tanh(c))
        return h, c

    def run(self, xs: list[Tensor]) -> list[Tensor]:
        state = self.initial_state()
        hs = []
        for x in xs:
            h, c = self.step(x, state)
            state = (h, c)
            hs.append(h)
        return hs


def _slice(t: Tensor, lo: int, hi: int) -> Tensor:
    def push(g):
        t.grad[lo:hi] += g

    return Tensor(t.value[lo:hi], (t,), push)


class BiLstm(Layer):
    """Forward and backward LSTM; outputs concat(fwd_t, bwd_t) per step."""

    def __init__(self, input_dim: int, hidden_dim: int, rng):
        self.fwd = Lstm(input_dim, hidden_dim, rng)
        self.bwd = Lstm(input_dim, hidden_dim, rng)
        self.output_dim = 2 * hidden_dim

    def encode(self, xs: list[Tensor]) -> list[Tensor]:
        if not xs:
            raise ValueError("BiLstm.encode needs a nonempty sequence")
        fh = self.fwd.run(xs)
        bh = self.bwd.run(xs[::-1])[::-1]
        return [concat([f, b]) for f, b in zip(fh, bh)]


class Mlp(Layer):
    """Feed-forward net with tanh hidden layers and a linear output."""

    def __init__(self, sizes: list[int], rng):
        if len(sizes) < 2:
            raise ValueError("Mlp needs at least input and output sizes")
        self.sizes = list(sizes)
        self.weights = [
            Parameter(xavier_init(b, a, rng)) for a, b in zip(sizes[:-1], sizes[1:])
        ]
        self.biases = [Parameter(np.zeros(b)) for b in sizes[1:]]

    def forward(self, x: Tensor) -> tuple[list[Tensor], Tensor]:
        """Returns (hidden activations, output logits)."""
        hiddens = []
        out = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            out = add(matvec(w, out), b)
            if i < last:
                out = tanh(out)
                hiddens.append(out)
        return hiddens, out

    def __call__(self, x: Tensor) -> Tensor:
        return self.forward(x)[1]


class LuongAttention(Layer):
    """Global attention with the bilinear ("general") score."""

    def __init__(self, query_dim: int, memory_dim: int, rng):
        self.w_score = Parameter(xavier_init(memory_dim, query_dim, rng))

    def __call__(self, query: Tensor, memory: Tensor) -> tuple[Tensor, Tensor]:
        """``memory`` is (n, memory_dim) stacked encoder states.

        Returns (context vector, attention weights).
        """
        scores = matvec(memory, matvec(self.w_score, query))
        weights = softmax(scores)
        context = matvec_t(memory, weights)
        return context, weights


def dropout_mask(dim: int, rate: float, rng) -> np.ndarray:
    """Inverted-dropout mask: zeros with probability ``rate``, else 1/(1-rate)."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if rate == 0.0:
        return np.ones(dim)
    from .init import as_rng

    keep = as_rng(rng).random(dim) >= rate
    return keep / (1.0 - rate)
