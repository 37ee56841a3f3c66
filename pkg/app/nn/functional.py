"""
Stateless numerical helpers shared by the layers
"""

from typing import Optional, Sequence, Tuple

import numpy as np

from app.core.errors import NonFiniteError


def sigmoid(x: np.ndarray) -> np.ndarray:
    # Split by sign so neither branch overflows.
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(logits: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = logits - logits.max(axis=axis, keepdims=True)
    ex = np.exp(shifted)
    return ex / ex.sum(axis=axis, keepdims=True)


def logsumexp(x: np.ndarray, axis: Optional[int] = None, keepdims: bool = False) -> np.ndarray:
    """log(sum(exp(x))) with max subtraction."""
    x = np.asarray(x, dtype=np.float64)
    xmax = np.max(x, axis=axis, keepdims=True)
    xmax = np.where(np.isfinite(xmax), xmax, 0.0)
    out = np.log(np.sum(np.exp(x - xmax), axis=axis, keepdims=True)) + xmax
    if not keepdims:
        out = np.squeeze(out, axis=axis) if axis is not None else out.reshape(())
    return out


def dense_softmax(h: np.ndarray, W: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-step class distribution from hidden states [..., d] -> [..., K]."""
    return softmax(h @ W + b)


def masked_cross_entropy(probs: np.ndarray, gold: np.ndarray, mask: np.ndarray) -> float:
    """
    Mean negative log-likelihood over unmasked steps.

    Args:
        probs: [B, T, K] class distributions
        gold: [B, T] class ids
        mask: [B, T] 1 for real steps, 0 for padding
    """
    mask = mask.astype(np.float64)
    n = mask.sum()
    if n == 0:
        raise ValueError("every step is masked")
    picked = np.take_along_axis(probs, gold[..., None], axis=-1)[..., 0]
    nll = -np.log(np.clip(picked, 1e-300, None))
    return float((nll * mask).sum() / n)


def masked_cross_entropy_grad(probs: np.ndarray, gold: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Gradient of masked_cross_entropy with respect to the pre-softmax logits."""
    mask = mask.astype(np.float64)
    n = mask.sum()
    if n == 0:
        raise ValueError("every step is masked")
    grad = probs.copy()
    np.put_along_axis(grad, gold[..., None], np.take_along_axis(grad, gold[..., None], axis=-1) - 1.0, axis=-1)
    return grad * mask[..., None] / n


def reverse_index(lengths: np.ndarray, max_len: int) -> np.ndarray:
    """
    Per-row time index that reverses the first `length` steps and leaves
    padding in place. Applying it twice is the identity.
    """
    t = np.arange(max_len)[None, :]
    lengths = lengths[:, None]
    return np.where(t < lengths, lengths - 1 - t, t)


def reverse_padded(x: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Reverse each [B, T, ...] row within its true length."""
    idx = reverse_index(lengths, x.shape[1])
    return np.take_along_axis(x, idx.reshape(idx.shape + (1,) * (x.ndim - 2)), axis=1)


def check_finite(x: np.ndarray, what: str, step: Optional[int] = None) -> None:
    if not np.all(np.isfinite(x)):
        raise NonFiniteError(f"non-finite {what}", step=step)


def accuracy_counts(pred: np.ndarray, gold: np.ndarray, mask: np.ndarray) -> Tuple[int, int]:
    """(correct real steps, total real steps)."""
    real = mask.astype(bool)
    return int(((pred == gold) & real).sum()), int(real.sum())


def pad_sequences(sequences: Sequence[Sequence[int]], pad_value: int) -> Tuple[np.ndarray, np.ndarray]:
    """Post-pad id lists to the batch maximum; returns (ids [B, T], lengths [B])."""
    lengths = np.array([len(s) for s in sequences], dtype=np.int64)
    if lengths.size == 0 or lengths.min() < 1:
        raise ValueError("every sequence must be non-empty")
    out = np.full((len(sequences), int(lengths.max())), pad_value, dtype=np.int64)
    for row, seq in enumerate(sequences):
        out[row, :len(seq)] = seq
    return out, lengths


def length_mask(lengths: np.ndarray, max_len: int) -> np.ndarray:
    """[B, T] float mask, 1.0 on real steps."""
    return (np.arange(max_len)[None, :] < lengths[:, None]).astype(np.float64)
