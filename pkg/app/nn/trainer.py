"""
Epoch loops for the taggers and the encoder-decoder.

One seeded generator drives initialization and shuffling, batches are
post-padded to their own maximum length, and the weights with the lowest
validation loss are kept.
"""

import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from app.core.config import settings
from app.core.errors import NonFiniteError, TrainingDivergedError
from app.nn.checkpoint import ModelCheckpoint, NeuralModel, checkpoint_from_model
from app.nn.functional import accuracy_counts, length_mask, pad_sequences
from app.nn.optim import Adam
from app.nn.seq2seq import Seq2SeqModel, target_tensors
from app.nn.tagger import TAG_PAD, TAGGER_KINDS, SequenceTagger, tag_ids
from app.nn.vocabulary import Vocabulary
from app.schemas.schemas import ModelKind, SyllabifiedWord
from app.schemas.training import EpochMetrics, TrainConfig, TrainingHistory
from app.services.tagging import encode_tags

logger = logging.getLogger(__name__)

# (source ids, gold S/C string)
Example = Tuple[List[int], str]
# (loss, correct steps, total steps, correct words)
BatchResult = Tuple[float, int, int, int]

CRF_HEAD_NOTE = (
    "27 parameters (3x3 input kernel, 3x3 chain kernel, bias, left and right boundary), "
    "inferred from the 27-parameter gap between the BLSTM and BLSTM+CRF counts"
)


def default_train_config(kind: ModelKind, **overrides) -> TrainConfig:
    """Settings-backed defaults; the encoder-decoder uses its own batch size."""
    batch_size = settings.seq2seq_batch_size if ModelKind(kind) == ModelKind.SEQ2SEQ else settings.batch_size
    values = dict(
        epochs=settings.epochs,
        batch_size=batch_size,
        learning_rate=settings.learning_rate,
        embedding_dim=settings.embedding_dim,
        hidden_dim=settings.hidden_dim,
        units=settings.seq2seq_units,
        seed=settings.seed,
    )
    values.update({k: v for k, v in overrides.items() if v is not None})
    return TrainConfig(**values)


def make_examples(words: Sequence[SyllabifiedWord], vocab: Vocabulary, keep_hyphens: bool) -> List[Example]:
    return [(vocab.encode(w.surface, keep_hyphens=keep_hyphens), encode_tags(w).tags) for w in words]


def batch_indices(n: int, batch_size: int, rng: Optional[np.random.Generator] = None) -> List[np.ndarray]:
    """Shuffled (when rng is given) index batches covering 0..n-1."""
    order = rng.permutation(n) if rng is not None else np.arange(n)
    return [order[i:i + batch_size] for i in range(0, n, batch_size)]


def tagger_batch(model: SequenceTagger, batch: Sequence[Example], backward: bool) -> BatchResult:
    ids, lengths = pad_sequences([src for src, _ in batch], Vocabulary.PAD_ID)
    gold = np.full(ids.shape, TAG_PAD, dtype=np.int64)
    for row, (_, tags) in enumerate(batch):
        gold[row, :len(tags)] = tag_ids(tags)
    loss, scores = model.loss(ids, gold, lengths, backward=backward)

    correct = total = words = 0
    for row, path in enumerate(model.decode_scores(scores, lengths)):
        hits = sum(int(p == g) for p, g in zip(path, gold[row]))
        correct += hits
        total += len(path)
        words += int(hits == len(path))
    return loss, correct, total, words


def seq2seq_batch(model: Seq2SeqModel, batch: Sequence[Example], backward: bool) -> BatchResult:
    src, src_lengths = pad_sequences([s for s, _ in batch], Vocabulary.PAD_ID)
    tags = [t for _, t in batch]
    tgt_in, tgt_out, tgt_lengths = target_tensors(tags)
    loss, logits = model.loss(src, src_lengths, tgt_in, tgt_out, tgt_lengths, backward=backward)

    mask = length_mask(tgt_lengths, tgt_in.shape[1])
    pred = np.argmax(logits, axis=-1)
    correct, total = accuracy_counts(pred, tgt_out, mask)
    if backward:
        # teacher-forced: every step right, EOS included
        words = int((((pred == tgt_out) | (mask == 0)).all(axis=1)).sum())
    else:
        decoded = model.decode_greedy(src, src_lengths)
        words = sum(int(d.raw == gold) for d, gold in zip(decoded, tags))
    return loss, correct, total, words


def _run_pass(
    model: NeuralModel,
    examples: Sequence[Example],
    step: Callable[[NeuralModel, Sequence[Example], bool], BatchResult],
    batch_size: int,
    optimizer: Optional[Adam],
    rng: Optional[np.random.Generator],
    epoch: int,
) -> Tuple[float, float, float]:
    """One pass; trains when an optimizer is given. Returns (loss, tag acc, word acc)."""
    loss_sum = 0.0
    correct = total = words = 0
    for idx in batch_indices(len(examples), batch_size, rng):
        batch = [examples[i] for i in idx]
        try:
            if optimizer is not None:
                model.zero_grad()
            loss, c, t, w = step(model, batch, optimizer is not None)
            if not math.isfinite(loss):
                raise TrainingDivergedError(epoch, loss)
            if optimizer is not None:
                optimizer.step()
        except NonFiniteError as e:
            raise TrainingDivergedError(epoch, float("nan")) from e
        loss_sum += loss * len(batch)
        correct += c
        total += t
        words += w
    n = len(examples)
    return loss_sum / n, correct / max(total, 1), words / n


def _fit(
    model: NeuralModel,
    kind: ModelKind,
    train: Sequence[Example],
    valid: Sequence[Example],
    step: Callable[[NeuralModel, Sequence[Example], bool], BatchResult],
    cfg: TrainConfig,
    vocab: Vocabulary,
) -> Tuple[ModelCheckpoint, TrainingHistory]:
    if not train or not valid:
        raise ValueError("training and validation splits must be non-empty")
    rng = np.random.default_rng(cfg.seed)
    optimizer = Adam(model, lr=cfg.learning_rate)
    history: List[EpochMetrics] = []
    best_loss = math.inf
    best_epoch = 0
    best_params = None

    logger.info(
        "Training %s (%d parameters) on %d words, validating on %d",
        kind.value, model.count_parameters(), len(train), len(valid),
    )
    for epoch in range(1, cfg.epochs + 1):
        train_loss, train_acc, _ = _run_pass(model, train, step, cfg.batch_size, optimizer, rng, epoch)
        valid_loss, valid_acc, valid_word_acc = _run_pass(model, valid, step, cfg.batch_size, None, None, epoch)
        metrics = EpochMetrics(
            epoch=epoch,
            train_loss=train_loss,
            train_acc=train_acc,
            valid_loss=valid_loss,
            valid_acc=valid_acc,
            valid_word_acc=valid_word_acc,
        )
        history.append(metrics)
        logger.info(
            "epoch %d/%d: train_loss=%.4f train_acc=%.4f valid_loss=%.4f valid_acc=%.4f valid_word_acc=%.4f",
            epoch, cfg.epochs, train_loss, train_acc, valid_loss, valid_acc, valid_word_acc,
        )
        if valid_loss < best_loss:
            best_loss = valid_loss
            best_epoch = epoch
            best_params = {k: v.copy() for k, v in model.named_parameters().items()}

    model.load_parameters(best_params)
    logger.info("Keeping weights from epoch %d (valid_loss=%.4f)", best_epoch, best_loss)
    metadata = {"best_epoch": best_epoch, "train_config": cfg.model_dump(), "selection": "lowest valid_loss"}
    if kind is ModelKind.BLSTM_CRF:
        metadata["crf_head"] = CRF_HEAD_NOTE
    checkpoint = checkpoint_from_model(model, kind, vocab.to_list(), metadata=metadata)
    return checkpoint, TrainingHistory(epochs=history, best_epoch=best_epoch)


def train_tagger(
    kind: ModelKind,
    train: Sequence[SyllabifiedWord],
    valid: Sequence[SyllabifiedWord],
    cfg: TrainConfig,
) -> Tuple[ModelCheckpoint, TrainingHistory]:
    """Train an LSTM, BLSTM or BLSTM+CRF tagger on hyphen-stripped surfaces."""
    kind = ModelKind(kind)
    if kind not in TAGGER_KINDS:
        raise ValueError(f"{kind.value} is not a tagger architecture")
    vocab = Vocabulary.default()
    model = SequenceTagger(kind, len(vocab), cfg.embedding_dim, cfg.hidden_dim, seed=cfg.seed)
    return _fit(
        model, kind,
        make_examples(train, vocab, keep_hyphens=False),
        make_examples(valid, vocab, keep_hyphens=False),
        tagger_batch, cfg, vocab,
    )


def train_seq2seq(
    train: Sequence[SyllabifiedWord],
    valid: Sequence[SyllabifiedWord],
    cfg: TrainConfig,
) -> Tuple[ModelCheckpoint, TrainingHistory]:
    """Teacher-forced encoder-decoder training; hyphens stay in the source."""
    vocab = Vocabulary.default()
    model = Seq2SeqModel(len(vocab), cfg.embedding_dim, cfg.units, seed=cfg.seed)
    return _fit(
        model, ModelKind.SEQ2SEQ,
        make_examples(train, vocab, keep_hyphens=True),
        make_examples(valid, vocab, keep_hyphens=True),
        seq2seq_batch, cfg, vocab,
    )
