"""
Character taggers: embedding -> (B)LSTM -> dense head over {S, C, PAD},
optionally followed by a CRF layer.
"""

import logging
from typing import Any, Dict, List, Tuple

import numpy as np

from app.nn.crf import CrfLayer, crf_nll_batch, viterbi_decode
from app.nn.functional import (
    dense_softmax,
    length_mask,
    masked_cross_entropy,
    masked_cross_entropy_grad,
    softmax,
)
from app.nn.layers import Bidirectional, Dense, Embedding, Layer, Lstm
from app.schemas.schemas import ModelKind

logger = logging.getLogger(__name__)

TAG_S = 0
TAG_C = 1
TAG_PAD = 2
TAG_SYMBOLS = ("S", "C")
TAGGER_KINDS = (ModelKind.LSTM, ModelKind.BLSTM, ModelKind.BLSTM_CRF)


def tag_ids(tags: str) -> List[int]:
    return [TAG_S if t == "S" else TAG_C for t in tags]


def allowed_tags(length: int, num_classes: int = 3) -> np.ndarray:
    """[T, K] mask: PAD never allowed, the first step may only be S."""
    allowed = np.ones((length, num_classes), dtype=bool)
    allowed[:, TAG_PAD] = False
    allowed[0] = False
    allowed[0, TAG_S] = True
    return allowed


class SequenceTagger(Layer):
    """
    One tagger network. Parameter names are prefixed by child:
    embedding/, encoder/ (encoder/forward/, encoder/backward/ when
    bidirectional), head/ and crf/.
    """

    def __init__(
        self,
        kind: ModelKind,
        vocab_size: int = 27,
        embedding_dim: int = 128,
        hidden_dim: int = 256,
        num_classes: int = 3,
        seed: int = 42,
    ):
        super().__init__()
        kind = ModelKind(kind)
        if kind not in TAGGER_KINDS:
            raise ValueError(f"{kind.value} is not a tagger architecture")
        self.kind = kind
        self.vocab_size = vocab_size
        self.embedding_dim = embedding_dim
        self.hidden_dim = hidden_dim
        self.num_classes = num_classes
        self.seed = seed

        rng = np.random.default_rng(seed)
        self.embedding = self.add_child("embedding", Embedding(vocab_size, embedding_dim, rng))
        if kind == ModelKind.LSTM:
            self.encoder = self.add_child("encoder", Lstm(embedding_dim, hidden_dim, rng))
            head_in = hidden_dim
        else:
            self.encoder = self.add_child(
                "encoder",
                Bidirectional(Lstm(embedding_dim, hidden_dim, rng), Lstm(embedding_dim, hidden_dim, rng)),
            )
            head_in = 2 * hidden_dim
        self.head = self.add_child("head", Dense(head_in, num_classes, rng))
        self.crf = self.add_child("crf", CrfLayer(num_classes, rng)) if kind == ModelKind.BLSTM_CRF else None

    @property
    def hyperparameters(self) -> Dict[str, Any]:
        return {
            "vocab_size": self.vocab_size,
            "embedding_dim": self.embedding_dim,
            "hidden_dim": self.hidden_dim,
            "num_classes": self.num_classes,
            "seed": self.seed,
        }

    def encode(self, ids: np.ndarray, lengths: np.ndarray) -> np.ndarray:
        """Hidden states [B, T, H] (or [B, T, 2H] when bidirectional)."""
        x = self.embedding.forward(ids)
        if isinstance(self.encoder, Bidirectional):
            return self.encoder.forward(x, lengths)
        return self.encoder.forward(x)

    def forward(self, ids: np.ndarray, lengths: np.ndarray) -> np.ndarray:
        """Per-step scores [B, T, K]: softmax logits, or CRF emissions."""
        scores = self.head.forward(self.encode(ids, lengths))
        if self.crf is not None:
            scores = self.crf.project(scores)
        return scores

    def loss(self, ids: np.ndarray, gold: np.ndarray, lengths: np.ndarray, backward: bool = True) -> Tuple[float, np.ndarray]:
        """
        Batch loss and the step scores it was computed from.

        Softmax heads use masked cross-entropy (mean over real steps); the
        CRF variant uses the mean sequence NLL. With backward=True the
        gradients are accumulated into every layer.
        """
        scores = self.forward(ids, lengths)
        if self.crf is not None:
            loss, d_scores = crf_nll_batch(scores, gold, lengths, self.crf)
            if backward:
                d_scores = self.crf.project_backward(d_scores)
        else:
            mask = length_mask(lengths, ids.shape[1])
            probs = softmax(scores)
            loss = masked_cross_entropy(probs, gold, mask)
            d_scores = masked_cross_entropy_grad(probs, gold, mask)
        if backward:
            dh = self.head.backward(d_scores)
            dx = self.encoder.backward(dh)
            self.embedding.backward(dx)
        return loss, scores

    def probabilities(self, ids: np.ndarray, lengths: np.ndarray) -> np.ndarray:
        """Per-step distributions over {S, C, PAD} from the softmax head."""
        if self.crf is not None:
            raise ValueError("a CRF head has no per-step distribution")
        return dense_softmax(self.encode(ids, lengths), self.head.params["kernel"], self.head.params["bias"])

    def decode_scores(self, scores: np.ndarray, lengths: np.ndarray) -> List[List[int]]:
        """Best tag ids per row, over real steps only."""
        paths = []
        for row, length in enumerate(lengths):
            length = int(length)
            allowed = allowed_tags(length, self.num_classes)
            if self.crf is not None:
                path, _ = viterbi_decode(scores[row, :length], self.crf, allowed)
            else:
                masked = np.where(allowed, scores[row, :length], -np.inf)
                path = np.argmax(masked, axis=1).tolist()
            paths.append(path)
        return paths

    def predict(self, ids: np.ndarray, lengths: np.ndarray) -> List[str]:
        """S/C strings per row."""
        scores = self.forward(ids, lengths) if self.crf is not None else self.probabilities(ids, lengths)
        return ["".join(TAG_SYMBOLS[t] for t in path) for path in self.decode_scores(scores, lengths)]
