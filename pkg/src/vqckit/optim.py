"""Gradient-descent optimizers with per-parameter-set learning rates.

Different parameter sets of one model (variational angles vs. input scaling)
usually want different hyperparameters; both optimizers here take a default
rate plus per-set overrides keyed by parameter name.
"""

from __future__ import annotations

import numpy as np


class SGD:
    def __init__(self, lr: float = 0.01, per_set: dict[str, float] | None = None):
        self.lr = float(lr)
        self.per_set = dict(per_set or {})
        self.step_count = 0

    def rate(self, name: str) -> float:
        return self.per_set.get(name, self.lr)

    def step(self, params: dict[str, np.ndarray],
             grads: dict[str, np.ndarray]) -> None:
        self.step_count += 1
        for name, grad in grads.items():
            p = params[name]
            if p.shape != np.shape(grad):
                raise ValueError(f"{name}: gradient shape {np.shape(grad)} "
                                 f"does not match parameter shape {p.shape}")
            p -= self.rate(name) * grad


class Adam:
    def __init__(self, lr: float = 0.001, per_set: dict[str, float] | None = None,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = float(lr)
        self.per_set = dict(per_set or {})
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self._m: dict[str, np.ndarray] = {}
        self._v: dict[str, np.ndarray] = {}

    def rate(self, name: str) -> float:
        return self.per_set.get(name, self.lr)

    def step(self, params: dict[str, np.ndarray],
             grads: dict[str, np.ndarray]) -> None:
        self.step_count += 1
        t = self.step_count
        for name, grad in grads.items():
            p = params[name]
            if p.shape != np.shape(grad):
                raise ValueError(f"{name}: gradient shape {np.shape(grad)} "
                                 f"does not match parameter shape {p.shape}")
            if name not in self._m:
                self._m[name] = np.zeros_like(p)
                self._v[name] = np.zeros_like(p)
            m = self._m[name]
            v = self._v[name]
            m *= self.beta1
            m += (1 - self.beta1) * grad
            v *= self.beta2
            v += (1 - self.beta2) * np.square(grad)
            m_hat = m / (1 - self.beta1 ** t)
            v_hat = v / (1 - self.beta2 ** t)
            p -= self.rate(name) * m_hat / (np.sqrt(v_hat) + self.eps)
