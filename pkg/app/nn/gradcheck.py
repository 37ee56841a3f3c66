"""
Central-difference gradient checking for layers and composed models
"""

from typing import Callable, Dict

import numpy as np

DEFAULT_STEP = 1e-5


def numerical_gradient(loss_fn: Callable[[], float], array: np.ndarray, h: float = DEFAULT_STEP) -> np.ndarray:
    """
    d loss / d array by central differences.

    `array` is perturbed in place (and restored), so it must be the buffer
    the loss function reads.
    """
    grad = np.zeros_like(array)
    flat = array.reshape(-1)
    out = grad.reshape(-1)
    for i in range(flat.size):
        saved = flat[i]
        flat[i] = saved + h
        plus = loss_fn()
        flat[i] = saved - h
        minus = loss_fn()
        flat[i] = saved
        out[i] = (plus - minus) / (2.0 * h)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric), 1e-8)
    return float(np.linalg.norm(analytic - numeric) / scale)


def check_gradients(
    model,
    loss_and_backward: Callable[[], float],
    loss_only: Callable[[], float],
    h: float = DEFAULT_STEP,
) -> Dict[str, float]:
    """
    Relative error per named parameter of `model`.

    `loss_and_backward` runs forward + backward once (accumulating grads);
    `loss_only` recomputes the scalar loss for the perturbed parameters.
    """
    model.zero_grad()
    loss_and_backward()
    analytic = {name: g.copy() for name, g in model.named_gradients().items()}
    errors = {}
    for name, value in model.named_parameters().items():
        numeric = numerical_gradient(loss_only, value, h)
        errors[name] = relative_error(analytic[name], numeric)
    return errors
