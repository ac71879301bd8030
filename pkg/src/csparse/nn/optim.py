"""SGD optimizers: momentum and vanilla, with optional global-norm clipping."""

from __future__ import annotations

import numpy as np

from .tensor import Parameter


class Sgd:
    """Stochastic gradient descent over a fixed parameter list.

    ``momentum > 0`` keeps a per-parameter velocity buffer
    (v = mu * v - lr * grad; p += v); ``momentum = 0`` is the vanilla
    update.  When ``clip_norm`` is set, gradients are rescaled before the
    step whenever their global L2 norm exceeds it.  Every step verifies
    that parameters stay finite.
    """

    def __init__(
        self,
        params: list[Parameter],
        lr: float,
        momentum: float = 0.0,
        clip_norm: float | None = None,
    ):
        if lr <= 0:
            raise ValueError(f"learning rate must be > 0, got {lr}")
        if not 0.0 <= momentum < 1.0:
            raise ValueError(f"momentum must be in [0, 1), got {momentum}")
        self.params = list(params)
        self.lr = lr
        self.momentum = momentum
        self.clip_norm = clip_norm
        self.velocity = (
            [np.zeros_like(p.value) for p in self.params] if momentum > 0 else None
        )

    def grad_norm(self) -> float:
        total = 0.0
        for p in self.params:
            total += float(np.dot(p.grad.ravel(), p.grad.ravel()))
        return float(np.sqrt(total))

    def step(self):
        if self.clip_norm is not None:
            norm = self.grad_norm()
            if norm > self.clip_norm:
                factor = self.clip_norm / norm
                for p in self.params:
                    p.grad *= factor
        if self.velocity is not None:
            for p, vel in zip(self.params, self.velocity):
                vel *= self.momentum
                vel -= self.lr * p.grad
                p.value += vel
        else:
            for p in self.params:
                p.value -= self.lr * p.grad
        for p in self.params:
            if not np.isfinite(p.value).all():
                raise FloatingPointError("parameter became NaN/Inf during update")

    def zero_grad(self):
        for p in self.params:
            p.zero_grad()
