"""
Linear-chain CRF over a small tag space.

The layer projects the dense-head outputs through its own K x K input kernel;
the scoring functions below take those projected emissions and add the
per-tag bias, chain transitions and the two boundary vectors.
"""

import itertools
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.nn.functional import check_finite, logsumexp
from app.nn.layers import Layer, glorot_uniform


class CrfLayer(Layer):
    """Input kernel, chain kernel, bias and left/right boundaries: 2K^2 + 3K = 27 parameters at K=3."""

    def __init__(self, num_tags: int, rng: np.random.Generator):
        super().__init__()
        self.num_tags = num_tags
        self.add_param("kernel", glorot_uniform(rng, (num_tags, num_tags)))
        self.add_param("chain_kernel", glorot_uniform(rng, (num_tags, num_tags)))
        self.add_param("bias", np.zeros(num_tags))
        self.add_param("left_boundary", np.zeros(num_tags))
        self.add_param("right_boundary", np.zeros(num_tags))
        self._x: Optional[np.ndarray] = None

    @classmethod
    def zeros(cls, num_tags: int = 3) -> "CrfLayer":
        layer = cls(num_tags, np.random.default_rng(0))
        for value in layer.params.values():
            value.fill(0.0)
        return layer

    def project(self, x: np.ndarray) -> np.ndarray:
        """Dense-head outputs [..., K] -> emissions [..., K]."""
        self._x = x
        return x @ self.params["kernel"]

    def project_backward(self, d_emissions: np.ndarray) -> np.ndarray:
        if self._x is None:
            raise RuntimeError("backward called before forward")
        K = self.num_tags
        self.grads["kernel"] += self._x.reshape(-1, K).T @ d_emissions.reshape(-1, K)
        return d_emissions @ self.params["kernel"].T


def crf_sequence_score(emissions: np.ndarray, path: Sequence[int], layer: CrfLayer) -> float:
    """Unary (+bias), transition and boundary scores of one tag path over [T, K] emissions."""
    T = emissions.shape[0]
    if len(path) != T:
        raise ValueError(f"path length {len(path)} does not match {T} steps")
    p = layer.params
    path = np.asarray(path)
    score = (emissions[np.arange(T), path] + p["bias"][path]).sum()
    score += p["chain_kernel"][path[:-1], path[1:]].sum()
    score += p["left_boundary"][path[0]] + p["right_boundary"][path[-1]]
    return float(score)


def crf_log_partition(emissions: np.ndarray, layer: CrfLayer) -> float:
    """log of the summed exp-scores over all K^T paths (forward algorithm)."""
    if emissions.shape[0] < 1:
        raise ValueError("need at least one step")
    check_finite(emissions, "CRF emissions")
    lengths = np.array([emissions.shape[0]])
    alphas = _forward_alphas(emissions[None], lengths, layer)
    return float(logsumexp(alphas[0, -1] + layer.params["right_boundary"]))


def crf_nll(emissions: np.ndarray, path: Sequence[int], layer: CrfLayer) -> float:
    """Negative log-likelihood of the gold path for one sequence."""
    return crf_log_partition(emissions, layer) - crf_sequence_score(emissions, path, layer)


def _forward_alphas(emissions: np.ndarray, lengths: np.ndarray, layer: CrfLayer) -> np.ndarray:
    """
    Log forward variables [B, T, K]. Past a row's true length the last real
    alpha is carried forward, so alphas[:, -1] is always the final one.
    """
    p = layer.params
    unary = emissions + p["bias"]
    B, T, K = unary.shape
    alphas = np.zeros((B, T, K))
    alphas[:, 0] = unary[:, 0] + p["left_boundary"]
    for t in range(1, T):
        step = logsumexp(alphas[:, t - 1, :, None] + p["chain_kernel"][None], axis=1) + unary[:, t]
        real = (t < lengths)[:, None]
        alphas[:, t] = np.where(real, step, alphas[:, t - 1])
    return alphas


def _backward_betas(emissions: np.ndarray, lengths: np.ndarray, layer: CrfLayer) -> np.ndarray:
    """Log backward variables [B, T, K]; rows at or past their last step hold the right boundary."""
    p = layer.params
    unary = emissions + p["bias"]
    B, T, K = unary.shape
    betas = np.zeros((B, T, K))
    betas[:, T - 1] = p["right_boundary"]
    for t in range(T - 2, -1, -1):
        step = logsumexp(p["chain_kernel"][None] + (unary[:, t + 1] + betas[:, t + 1])[:, None, :], axis=2)
        real = (t + 1 < lengths)[:, None]
        betas[:, t] = np.where(real, step, p["right_boundary"])
    return betas


def crf_nll_batch(
    emissions: np.ndarray, gold: np.ndarray, lengths: np.ndarray, layer: CrfLayer
) -> Tuple[float, np.ndarray]:
    """
    Mean NLL over a padded batch and its gradient w.r.t. the emissions.

    Gradients for bias, chain kernel and boundaries are accumulated into
    layer.grads. Padding steps are excluded from the chain.
    """
    check_finite(emissions, "CRF emissions")
    p = layer.params
    B, T, K = emissions.shape
    mask = (np.arange(T)[None, :] < lengths[:, None]).astype(np.float64)
    rows = np.arange(B)
    last = lengths - 1

    alphas = _forward_alphas(emissions, lengths, layer)
    betas = _backward_betas(emissions, lengths, layer)
    log_z = logsumexp(alphas[:, -1] + p["right_boundary"], axis=1)

    unary = emissions + p["bias"]
    gold_unary = (np.take_along_axis(unary, gold[..., None], axis=2)[..., 0] * mask).sum(axis=1)
    gold_chain = (p["chain_kernel"][gold[:, :-1], gold[:, 1:]] * mask[:, 1:]).sum(axis=1)
    gold_score = gold_unary + gold_chain + p["left_boundary"][gold[:, 0]] + p["right_boundary"][gold[rows, last]]
    loss = float((log_z - gold_score).mean())

    gold_onehot = np.eye(K)[gold] * mask[..., None]
    marginals = np.where(mask[..., None] > 0, np.exp(alphas + betas - log_z[:, None, None]), 0.0)
    d_unary = (marginals - gold_onehot) / B

    if T > 1:
        pair = (alphas[:, :-1, :, None] + p["chain_kernel"][None, None]
                + (unary[:, 1:] + betas[:, 1:])[:, :, None, :] - log_z[:, None, None, None])
        pair_marginals = np.where(mask[:, 1:, None, None] > 0, np.exp(pair), 0.0)
        gold_pairs = gold_onehot[:, :-1, :, None] * gold_onehot[:, 1:, None, :]
        layer.grads["chain_kernel"] += (pair_marginals - gold_pairs).sum(axis=(0, 1)) / B

    layer.grads["bias"] += d_unary.sum(axis=(0, 1))
    layer.grads["left_boundary"] += (marginals[:, 0] - gold_onehot[:, 0]).sum(axis=0) / B
    layer.grads["right_boundary"] += (marginals[rows, last] - gold_onehot[rows, last]).sum(axis=0) / B
    return loss, d_unary


def viterbi_decode(
    emissions: np.ndarray, layer: CrfLayer, allowed: Optional[np.ndarray] = None
) -> Tuple[List[int], float]:
    """
    Exact best path over [T, K] emissions and its score.

    `allowed` is an optional boolean [T, K] mask of permitted tags. Ties go
    to the lower tag index.
    """
    T, K = emissions.shape
    if T < 1:
        raise ValueError("need at least one step")
    p = layer.params
    unary = emissions + p["bias"]
    if allowed is not None:
        unary = np.where(allowed, unary, -np.inf)

    score = unary[0] + p["left_boundary"]
    backptr = np.zeros((T, K), dtype=np.int64)
    for t in range(1, T):
        cand = score[:, None] + p["chain_kernel"]
        backptr[t] = np.argmax(cand, axis=0)
        score = cand[backptr[t], np.arange(K)] + unary[t]
    final = score + p["right_boundary"]
    best = int(np.argmax(final))
    path = [best]
    for t in range(T - 1, 0, -1):
        best = int(backptr[t, best])
        path.append(best)
    path.reverse()
    return path, float(crf_sequence_score(emissions, path, layer))


def brute_force_paths(num_steps: int, num_tags: int = 3):
    """Every tag path of the given length (for exhaustive checks on tiny instances)."""
    return itertools.product(range(num_tags), repeat=num_steps)
