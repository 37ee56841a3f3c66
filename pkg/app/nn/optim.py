"""
Adam with bias-corrected moments, updating parameter arrays in place
"""

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from app.core.errors import NonFiniteError

BETA_1 = 0.9
BETA_2 = 0.999
EPSILON = 1e-7


@dataclass
class AdamState:
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0


def adam_step(
    params: Dict[str, np.ndarray],
    grads: Dict[str, np.ndarray],
    state: AdamState,
    t: int,
    lr: float,
    beta_1: float = BETA_1,
    beta_2: float = BETA_2,
    epsilon: float = EPSILON,
) -> None:
    """One update at step t (1-based). Moments live in `state`, keyed like `params`."""
    if t < 1:
        raise ValueError(f"Adam step index must be >= 1, got {t}")
    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise NonFiniteError(f"non-finite gradient for {name}", step=t)

    correction_1 = 1.0 - beta_1 ** t
    correction_2 = 1.0 - beta_2 ** t
    for name, p in params.items():
        g = grads[name]
        m = state.m.setdefault(name, np.zeros_like(p))
        v = state.v.setdefault(name, np.zeros_like(p))
        m *= beta_1
        m += (1.0 - beta_1) * g
        v *= beta_2
        v += (1.0 - beta_2) * g * g
        p -= lr * (m / correction_1) / (np.sqrt(v / correction_2) + epsilon)
    state.t = t


class Adam:
    """Stateful wrapper around adam_step for one model."""

    def __init__(self, model, lr: float = 1e-3):
        self.model = model
        self.lr = lr
        self.state = AdamState()

    def step(self) -> None:
        adam_step(
            self.model.named_parameters(),
            self.model.named_gradients(),
            self.state,
            self.state.t + 1,
            self.lr,
        )
