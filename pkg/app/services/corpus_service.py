"""
Service layer for corpus statistics, splitting and synthetic corpus generation
"""

import logging
import math
from collections import Counter
from typing import Dict, List, Optional, Tuple

import numpy as np

from app.core.config import settings
from app.core.inventory import marker_table, syllable_table
from app.schemas.schemas import CorpusStats, SplitSpec, SyllabifiedWord, SynthesisConfig

logger = logging.getLogger(__name__)

# Guards floor() against 0.1 * 10 landing at 0.999...
_FLOOR_EPS = 1e-9


class CorpusService:
    """Service class for corpus-level operations."""

    @staticmethod
    def corpus_stats(words: List[SyllabifiedWord]) -> CorpusStats:
        """Min/max/mean surface length; hyphens count as characters."""
        if not words:
            raise ValueError("corpus_stats needs at least one word")
        lengths = [len(w.surface) for w in words]
        return CorpusStats(
            word_count=len(lengths),
            min_len=min(lengths),
            max_len=max(lengths),
            mean_len=sum(lengths) / len(lengths),
        )

    @staticmethod
    def length_distribution(words: List[SyllabifiedWord]) -> Dict[int, int]:
        """Number of words per surface length."""
        return dict(sorted(Counter(len(w.surface) for w in words).items()))

    @staticmethod
    def syllable_count_distribution(words: List[SyllabifiedWord]) -> Dict[int, int]:
        """Number of words per syllable count."""
        return dict(sorted(Counter(len(w.syllables) for w in words).items()))

    @staticmethod
    def split(
        words: List[SyllabifiedWord], spec: SplitSpec
    ) -> Tuple[List[SyllabifiedWord], List[SyllabifiedWord], List[SyllabifiedWord]]:
        """
        Seeded shuffle followed by a contiguous train/valid/test partition.

        Validation and test sizes are floor(frac * N); train takes the remainder.
        """
        n = len(words)
        if n == 0:
            raise ValueError("cannot split an empty corpus")

        order = np.random.default_rng(spec.seed).permutation(n)
        shuffled = [words[i] for i in order]

        n_valid = math.floor(spec.valid_frac * n + _FLOOR_EPS)
        n_test = math.floor(spec.test_frac * n + _FLOOR_EPS)
        n_train = n - n_valid - n_test

        train = shuffled[:n_train]
        valid = shuffled[n_train:n_train + n_valid]
        test = shuffled[n_train + n_valid:]
        logger.info("Split %d words into %d/%d/%d", n, len(train), len(valid), len(test))
        return train, valid, test

    @staticmethod
    def synthesize_corpus(cfg: SynthesisConfig) -> List[SyllabifiedWord]:
        """
        Generate words by sampling syllables proportionally to frequency.

        The syllable count is geometric with its mean chosen so that the
        expected surface length (markers included) matches target_mean_len.
        """
        if not cfg.syllable_table:
            raise ValueError("syllable_table is empty")

        rng = np.random.default_rng(cfg.seed)
        syllables = [s for s, _ in cfg.syllable_table]
        probs = np.array([f for _, f in cfg.syllable_table], dtype=np.float64)
        probs /= probs.sum()

        markers = [m for m, _ in cfg.marker_table]
        marker_probs: Optional[np.ndarray] = None
        expected_marker_len = 0.0
        if markers:
            marker_probs = np.array([f for _, f in cfg.marker_table], dtype=np.float64)
            marker_probs /= marker_probs.sum()
            expected_marker_len = cfg.marker_probability * float(
                marker_probs @ np.array([len(m) for m in markers], dtype=np.float64)
            )

        mean_syllable_len = float(probs @ np.array([len(s) for s in syllables], dtype=np.float64))
        mean_count = max(1.0, (cfg.target_mean_len - expected_marker_len) / mean_syllable_len)
        geometric_p = 1.0 / mean_count

        words = []
        while len(words) < cfg.word_count:
            k = cfg.fixed_syllable_count or int(rng.geometric(geometric_p))
            picked = [syllables[i] for i in rng.choice(len(syllables), size=k, p=probs)]
            if markers and rng.random() < cfg.marker_probability:
                picked.append(markers[int(rng.choice(len(markers), p=marker_probs))])
            if cfg.max_word_len is not None and sum(len(s) for s in picked) > cfg.max_word_len:
                continue
            words.append(SyllabifiedWord(syllables=tuple(picked)))

        logger.info("Synthesized %d words (mean syllable count %.2f)", len(words), mean_count)
        return words


def default_synthesis_config(
    word_count: Optional[int] = None, seed: Optional[int] = None
) -> SynthesisConfig:
    """Generator config built from the published top-50 inventory and settings."""
    return SynthesisConfig(
        syllable_table=syllable_table(),
        marker_table=marker_table(),
        target_mean_len=settings.synth_target_mean_len,
        word_count=word_count if word_count is not None else settings.synth_word_count,
        seed=seed if seed is not None else settings.seed,
        marker_probability=settings.marker_probability,
    )
