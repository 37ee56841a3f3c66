"""
Attention encoder-decoder emitting S/C tags from characters.

Encoder: embedding -> bidirectional GRU (contexts of width 2U).
Decoder: GRU over GO + tags, started from tanh(W [h_fwd_last; h_bwd_first]),
additive attention with the decoder state as query, then
tanh(Wc [context; state]) -> softmax over {S, C, GO, EOS, PAD}.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from app.nn.functional import length_mask, masked_cross_entropy, masked_cross_entropy_grad, softmax
from app.nn.layers import Bidirectional, Dense, Embedding, Gru, Layer, glorot_uniform

logger = logging.getLogger(__name__)

TGT_S = 0
TGT_C = 1
GO = 2
EOS = 3
TGT_PAD = 4
TARGET_SYMBOLS = ("S", "C", "<go>", "<eos>", "<pad>")


class AdditiveAttention(Layer):
    """score(s, c_j) = v . tanh(c_j W1 + s W2), softmax over real source steps."""

    def __init__(self, memory_dim: int, query_dim: int, units: int, rng: np.random.Generator):
        super().__init__()
        self.add_param("memory_kernel", glorot_uniform(rng, (memory_dim, units)))
        self.add_param("query_kernel", glorot_uniform(rng, (query_dim, units)))
        self.add_param("score_vector", glorot_uniform(rng, (units, 1))[:, 0])
        self._cache = None

    def forward(self, queries: np.ndarray, contexts: np.ndarray, mask: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Args:
            queries: [B, T, Q] decoder states
            contexts: [B, S, M] encoder outputs
            mask: [B, S] 1 for real source steps

        Returns:
            (attended contexts [B, T, M], weights [B, T, S])
        """
        p = self.params
        keys = contexts @ p["memory_kernel"]
        q = queries @ p["query_kernel"]
        a = np.tanh(keys[:, None, :, :] + q[:, :, None, :])
        scores = a @ p["score_vector"]
        scores = np.where(mask[:, None, :] > 0, scores, -np.inf)
        weights = softmax(scores, axis=-1)
        self._cache = (queries, contexts, a, weights)
        return weights @ contexts, weights

    def backward(self, d_attended: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Returns (d queries, d contexts)."""
        if self._cache is None:
            raise RuntimeError("backward called before forward")
        queries, contexts, a, weights = self._cache
        p = self.params
        A = a.shape[-1]

        d_contexts = weights.transpose(0, 2, 1) @ d_attended
        d_w = d_attended @ contexts.transpose(0, 2, 1)
        d_scores = weights * (d_w - (weights * d_w).sum(axis=-1, keepdims=True))
        self.grads["score_vector"] += np.einsum("bts,btsa->a", d_scores, a)
        d_pre = d_scores[..., None] * p["score_vector"] * (1.0 - a ** 2)
        d_keys = d_pre.sum(axis=1)
        d_q = d_pre.sum(axis=2)
        self.grads["memory_kernel"] += contexts.reshape(-1, contexts.shape[-1]).T @ d_keys.reshape(-1, A)
        self.grads["query_kernel"] += queries.reshape(-1, queries.shape[-1]).T @ d_q.reshape(-1, A)
        d_contexts += d_keys @ p["memory_kernel"].T
        return d_q @ p["query_kernel"].T, d_contexts

    def attend(self, state: np.ndarray, contexts: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Single decoder state [Q] over one word's contexts [S, M] -> (context [M], weights [S])."""
        if contexts.shape[0] < 1:
            raise ValueError("contexts must be non-empty")
        attended, weights = self.forward(state[None, None], contexts[None], np.ones((1, contexts.shape[0])))
        return attended[0, 0], weights[0, 0]


@dataclass
class Decoded:
    """Greedy output for one word: emitted S/C string, emitted symbols (EOS included) and attention rows."""
    raw: str
    symbols: List[str] = field(default_factory=list)
    weights: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))


def target_tensors(tag_strings: Sequence[str]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Teacher-forcing tensors: (GO + tags, tags + EOS, lengths), post-padded with TGT_PAD."""
    lengths = np.array([len(t) + 1 for t in tag_strings], dtype=np.int64)
    T = int(lengths.max())
    tgt_in = np.full((len(tag_strings), T), TGT_PAD, dtype=np.int64)
    tgt_out = np.full((len(tag_strings), T), TGT_PAD, dtype=np.int64)
    for row, tags in enumerate(tag_strings):
        ids = [TGT_S if t == "S" else TGT_C for t in tags]
        tgt_in[row, :len(ids) + 1] = [GO] + ids
        tgt_out[row, :len(ids) + 1] = ids + [EOS]
    return tgt_in, tgt_out, lengths


class Seq2SeqModel(Layer):
    def __init__(
        self,
        source_vocab_size: int = 27,
        embedding_dim: int = 128,
        units: int = 512,
        target_vocab_size: int = len(TARGET_SYMBOLS),
        seed: int = 42,
    ):
        super().__init__()
        self.source_vocab_size = source_vocab_size
        self.embedding_dim = embedding_dim
        self.units = units
        self.target_vocab_size = target_vocab_size
        self.seed = seed

        rng = np.random.default_rng(seed)
        U = units
        self.source_embedding = self.add_child("source_embedding", Embedding(source_vocab_size, embedding_dim, rng))
        self.encoder = self.add_child(
            "encoder", Bidirectional(Gru(embedding_dim, U, rng), Gru(embedding_dim, U, rng))
        )
        self.bridge = self.add_child("bridge", Dense(2 * U, U, rng, activation="tanh"))
        self.target_embedding = self.add_child("target_embedding", Embedding(target_vocab_size, embedding_dim, rng))
        self.decoder = self.add_child("decoder", Gru(embedding_dim, U, rng))
        self.attention = self.add_child("attention", AdditiveAttention(2 * U, U, U, rng))
        self.combine = self.add_child("combine", Dense(3 * U, U, rng, activation="tanh"))
        self.output = self.add_child("output", Dense(U, target_vocab_size, rng))

    @property
    def hyperparameters(self) -> Dict[str, Any]:
        return {
            "source_vocab_size": self.source_vocab_size,
            "embedding_dim": self.embedding_dim,
            "units": self.units,
            "target_vocab_size": self.target_vocab_size,
            "seed": self.seed,
        }

    def encode(self, ids: np.ndarray, lengths: np.ndarray) -> np.ndarray:
        """Per-character contexts [B, S, 2U]."""
        return self.encoder.forward(self.source_embedding.forward(ids), lengths)

    def _initial_state(self, contexts: np.ndarray, lengths: np.ndarray) -> np.ndarray:
        U = self.units
        rows = np.arange(contexts.shape[0])
        summary = np.concatenate([contexts[rows, lengths - 1, :U], contexts[:, 0, U:]], axis=-1)
        return self.bridge.forward(summary)

    def loss(
        self,
        src_ids: np.ndarray,
        src_lengths: np.ndarray,
        tgt_in: np.ndarray,
        tgt_out: np.ndarray,
        tgt_lengths: np.ndarray,
        backward: bool = True,
    ) -> Tuple[float, np.ndarray]:
        """Teacher-forced masked cross-entropy; returns (loss, logits [B, T, 5])."""
        U = self.units
        contexts = self.encode(src_ids, src_lengths)
        s0 = self._initial_state(contexts, src_lengths)
        states = self.decoder.forward(self.target_embedding.forward(tgt_in), h0=s0)
        attended, _ = self.attention.forward(states, contexts, length_mask(src_lengths, src_ids.shape[1]))
        logits = self.output.forward(self.combine.forward(np.concatenate([attended, states], axis=-1)))

        mask = length_mask(tgt_lengths, tgt_in.shape[1])
        probs = softmax(logits)
        loss = masked_cross_entropy(probs, tgt_out, mask)
        if not backward:
            return loss, logits

        d_cat = self.combine.backward(self.output.backward(masked_cross_entropy_grad(probs, tgt_out, mask)))
        d_states_query, d_contexts = self.attention.backward(d_cat[..., :2 * U])
        d_y, d_s0 = self.decoder.backward(d_cat[..., 2 * U:] + d_states_query)
        self.target_embedding.backward(d_y)
        d_summary = self.bridge.backward(d_s0)
        rows = np.arange(src_ids.shape[0])
        d_contexts[rows, src_lengths - 1, :U] += d_summary[:, :U]
        d_contexts[:, 0, U:] += d_summary[:, U:]
        self.source_embedding.backward(self.encoder.backward(d_contexts))
        return loss, logits

    def decode_greedy(self, src_ids: np.ndarray, src_lengths: np.ndarray) -> List[Decoded]:
        """
        Batched greedy decoding. Each word stops at EOS or after 2x its
        source length; GO and PAD are never emitted.
        """
        B = src_ids.shape[0]
        contexts = self.encode(src_ids, src_lengths)
        h = self._initial_state(contexts, src_lengths)
        src_mask = length_mask(src_lengths, src_ids.shape[1])
        table = self.target_embedding.params["embeddings"]

        token = np.full(B, GO, dtype=np.int64)
        caps = 2 * src_lengths
        emitted: List[List[int]] = [[] for _ in range(B)]
        rows: List[List[np.ndarray]] = [[] for _ in range(B)]
        done = np.zeros(B, dtype=bool)
        for _ in range(int(caps.max())):
            h, _ = self.decoder.cell(self.decoder.input_projection(table[token]), h)
            attended, weights = self.attention.forward(h[:, None], contexts, src_mask)
            logits = self.output.forward(self.combine.forward(np.concatenate([attended[:, 0], h], axis=-1)))
            logits[:, [GO, TGT_PAD]] = -np.inf
            token = np.argmax(logits, axis=-1)
            for b in np.flatnonzero(~done):
                emitted[b].append(int(token[b]))
                rows[b].append(weights[b, 0, :src_lengths[b]])
                if token[b] == EOS or len(emitted[b]) >= caps[b]:
                    done[b] = True
            if done.all():
                break

        results = []
        for b in range(B):
            raw = "".join(TARGET_SYMBOLS[t] for t in emitted[b] if t in (TGT_S, TGT_C))
            results.append(Decoded(
                raw=raw,
                symbols=[TARGET_SYMBOLS[t] for t in emitted[b]],
                weights=np.stack(rows[b]),
            ))
        return results
