"""
Inference front end over any trained syllabifier: tagger checkpoints,
encoder-decoder checkpoints and baseline inventories.
"""

import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

from app.core.errors import SegmentationError, TaggingError, VocabularyMismatchError
from app.nn.checkpoint import (
    ModelCheckpoint,
    NeuralModel,
    is_checkpoint_file,
    load_checkpoint,
    model_from_checkpoint,
)
from app.nn.functional import pad_sequences
from app.nn.seq2seq import Decoded, Seq2SeqModel
from app.nn.vocabulary import Vocabulary
from app.parsers.corpus_parser import parse_inventory
from app.schemas.reports import AttentionTrace
from app.schemas.schemas import ModelKind, SyllabifiedWord, SyllableInventory, TagSequence
from app.services.baseline import segment
from app.services.tagging import decode_tags, encode_tags, fit_tags, taggable_letters

logger = logging.getLogger(__name__)

INFERENCE_BATCH = 256


class Syllabifier:
    """Wraps one loaded model behind a common predict/syllabify surface."""

    def __init__(
        self,
        kind: ModelKind,
        model: Optional[NeuralModel] = None,
        vocab: Optional[Vocabulary] = None,
        inventory: Optional[SyllableInventory] = None,
    ):
        self.kind = ModelKind(kind)
        if self.kind == ModelKind.BASELINE and inventory is None:
            raise ValueError("baseline syllabifier needs an inventory")
        if self.kind != ModelKind.BASELINE and model is None:
            raise ValueError(f"{self.kind.value} syllabifier needs a model")
        self.model = model
        self.vocab = vocab or Vocabulary.default()
        self.inventory = inventory

    @classmethod
    def from_checkpoint(cls, checkpoint: ModelCheckpoint) -> "Syllabifier":
        return cls(checkpoint.architecture, model_from_checkpoint(checkpoint), Vocabulary(checkpoint.vocabulary))

    @classmethod
    def from_path(cls, path: Union[str, Path]) -> "Syllabifier":
        """Checkpoint files are recognized by their magic bytes; anything else is read as an inventory."""
        if is_checkpoint_file(path):
            return cls.from_checkpoint(load_checkpoint(path))
        inventory = parse_inventory(Path(path).read_text(encoding="utf-8"))
        logger.info("Loaded baseline inventory of %d syllables from %s", len(inventory.syllables), path)
        return cls(ModelKind.BASELINE, inventory=inventory)

    @property
    def keeps_hyphens(self) -> bool:
        return self.kind == ModelKind.SEQ2SEQ

    def _check(self, surface: str) -> None:
        if not taggable_letters(surface):
            raise TaggingError(f"nothing to tag in {surface!r}")

    def _encode(self, surfaces: Sequence[str]):
        return pad_sequences([self.vocab.encode(s, keep_hyphens=self.keeps_hyphens) for s in surfaces], Vocabulary.PAD_ID)

    def _chunks(self, surfaces: Sequence[str]):
        for start in range(0, len(surfaces), INFERENCE_BATCH):
            yield surfaces[start:start + INFERENCE_BATCH]

    def decode(self, surfaces: Sequence[str]) -> List[Decoded]:
        """Greedy encoder-decoder outputs (seq2seq only)."""
        if not isinstance(self.model, Seq2SeqModel):
            raise ValueError(f"{self.kind.value} has no encoder-decoder")
        out: List[Decoded] = []
        for chunk in self._chunks(list(surfaces)):
            for s in chunk:
                self._check(s)
            ids, lengths = self._encode(chunk)
            out.extend(self.model.decode_greedy(ids, lengths))
        return out

    def predict_raw(self, surfaces: Sequence[str]) -> List[str]:
        """
        Unfitted tag strings: exactly what each model emits. Baseline
        failures come back as "".
        """
        surfaces = list(surfaces)
        for s in surfaces:
            self._check(s)
        if self.kind == ModelKind.BASELINE:
            results = []
            for s in surfaces:
                parsed = segment(s, self.inventory)
                results.append(encode_tags(parsed).tags if parsed is not None else "")
            return results
        if isinstance(self.model, Seq2SeqModel):
            return [d.raw for d in self.decode(surfaces)]
        out: List[str] = []
        for chunk in self._chunks(surfaces):
            ids, lengths = self._encode(chunk)
            out.extend(self.model.predict(ids, lengths))
        return out

    def predict_tags(self, surface: str) -> TagSequence:
        """A valid tag sequence for one word, fitted to its letter count when necessary."""
        raw = self.predict_raw([surface])[0]
        if self.kind == ModelKind.BASELINE and not raw:
            raise SegmentationError(f"no inventory segmentation for {surface!r}")
        letters = len(taggable_letters(surface))
        if len(raw) != letters:
            logger.warning("%s emitted %d tags for %d letters in %r", self.kind.value, len(raw), letters, surface)
        return fit_tags(raw, letters)

    def syllabify(self, surface: str) -> Optional[SyllabifiedWord]:
        """
        None when the word cannot be syllabified: the baseline has no cover,
        nothing is taggable, or a character is outside the vocabulary.
        """
        try:
            return decode_tags(surface, self.predict_tags(surface))
        except SegmentationError:
            return None
        except (TaggingError, VocabularyMismatchError) as exc:
            logger.warning("Skipping %r: %s", surface, exc)
            return None

    def attention_traces(self, surfaces: Sequence[str]) -> List[Tuple[Decoded, AttentionTrace]]:
        results = []
        for surface, decoded in zip(surfaces, self.decode(surfaces)):
            trace = AttentionTrace(
                word=surface,
                source=list(surface),
                targets=decoded.symbols,
                weights=decoded.weights.tolist(),
            )
            results.append((decoded, trace))
        return results
