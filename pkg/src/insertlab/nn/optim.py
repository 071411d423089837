"""Adam with the standard bias-corrected moment estimates."""

from __future__ import annotations

import numpy as np

from ..errors import UsageError
from .layers import ParameterSet


class AdamState:
    """Per-parameter first/second moments plus a shared step counter."""

    def __init__(self, params: ParameterSet, learning_rate: float = 1e-3,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        if learning_rate <= 0:
            raise UsageError("learning rate must be positive")
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self.m = {name: np.zeros_like(t.data) for name, t in params.items()}
        self.v = {name: np.zeros_like(t.data) for name, t in params.items()}


def adam_step(params: ParameterSet, state: AdamState) -> None:
    """One in-place Adam update; requires gradients populated via backward()."""
    grads = {}
    for name, t in params.items():
        if t.grad is None:
            raise UsageError(f"parameter {name!r} has no gradient for this step")
        grads[name] = t.grad
    state.step_count += 1
    t_step = state.step_count
    bias1 = 1.0 - state.beta1**t_step
    bias2 = 1.0 - state.beta2**t_step
    for name, tensor in params.items():
        g = grads[name]
        m = state.m[name]
        v = state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        m_hat = m / bias1
        v_hat = v / bias2
        tensor.data = tensor.data - state.learning_rate * m_hat / (np.sqrt(v_hat) + state.eps)
