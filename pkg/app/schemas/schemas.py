"""
Pydantic schemas for corpus, tagging and phonotactic data
"""

import math
import re
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

from app.core.alphabet import HYPHEN, TENYIDIE


class ModelKind(str, Enum):
    """Syllabifier architectures exposed by the toolkit."""
    LSTM = "lstm"
    BLSTM = "blstm"
    BLSTM_CRF = "blstm-crf"
    SEQ2SEQ = "seq2seq"
    BASELINE = "baseline"


def check_syllable(syllable: str) -> Optional[str]:
    """Return a reason the syllable is malformed, or None when it is fine."""
    if not syllable:
        return "empty syllable"
    for ch in syllable:
        if not TENYIDIE.is_valid(ch):
            return f"invalid character {ch!r}"
    if syllable.endswith(HYPHEN):
        return f"syllable {syllable!r} ends in a hyphen"
    return None


class SyllabifiedWord(BaseModel):
    """A word with its gold syllable decomposition."""

    model_config = ConfigDict(frozen=True)

    syllables: Tuple[str, ...] = Field(..., min_length=1)

    @field_validator("syllables")
    @classmethod
    def validate_syllables(cls, v: Tuple[str, ...]) -> Tuple[str, ...]:
        for syllable in v:
            reason = check_syllable(syllable)
            if reason:
                raise ValueError(reason)
        return v

    @computed_field
    @property
    def surface(self) -> str:
        return "".join(self.syllables)

    def to_line(self) -> str:
        """Corpus-format rendering (syllables joined by single spaces)."""
        return " ".join(self.syllables)

    def __str__(self) -> str:
        return self.to_line()


class CorpusStats(BaseModel):
    """Word-length statistics over a corpus."""
    word_count: int = Field(..., ge=0)
    min_len: int = Field(..., ge=0)
    max_len: int = Field(..., ge=0)
    mean_len: float = Field(..., ge=0)

    @model_validator(mode="after")
    def check_order(self) -> "CorpusStats":
        if not self.min_len <= self.mean_len <= self.max_len:
            raise ValueError("expected min_len <= mean_len <= max_len")
        return self


class SplitSpec(BaseModel):
    """Train/validation/test proportions and shuffle seed."""
    train_frac: float = Field(0.8, gt=0)
    valid_frac: float = Field(0.1, gt=0)
    test_frac: float = Field(0.1, gt=0)
    seed: int = 42

    @model_validator(mode="after")
    def check_sum(self) -> "SplitSpec":
        total = self.train_frac + self.valid_frac + self.test_frac
        if not math.isclose(total, 1.0, abs_tol=1e-9):
            raise ValueError(f"split fractions must sum to 1.0, got {total}")
        return self

    @classmethod
    def parse(cls, text: str, seed: int = 42) -> "SplitSpec":
        """Build from a ratio string such as "80:10:10"."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"split must have three parts, got {text!r}")
        values = [float(p) for p in parts]
        total = sum(values)
        if total <= 0:
            raise ValueError(f"split ratios must be positive, got {text!r}")
        return cls(
            train_frac=values[0] / total,
            valid_frac=values[1] / total,
            test_frac=values[2] / total,
            seed=seed,
        )


class SynthesisConfig(BaseModel):
    """Parameters of the synthetic corpus generator."""
    syllable_table: List[Tuple[str, int]]
    marker_table: List[Tuple[str, int]] = Field(default_factory=list)
    target_mean_len: float = Field(8.58, gt=0)
    word_count: int = Field(10_000, ge=1)
    seed: int = 42
    marker_probability: float = Field(0.15, ge=0, le=1)
    fixed_syllable_count: Optional[int] = Field(None, ge=1)
    max_word_len: Optional[int] = Field(None, ge=1)

    @field_validator("syllable_table")
    @classmethod
    def validate_syllables(cls, v: List[Tuple[str, int]]) -> List[Tuple[str, int]]:
        for syllable, freq in v:
            if freq <= 0:
                raise ValueError(f"frequency of {syllable!r} must be positive")
            if HYPHEN in syllable:
                raise ValueError(f"syllable {syllable!r} must not contain a hyphen")
            reason = check_syllable(syllable)
            if reason:
                raise ValueError(reason)
        return v

    @field_validator("marker_table")
    @classmethod
    def validate_markers(cls, v: List[Tuple[str, int]]) -> List[Tuple[str, int]]:
        for marker, freq in v:
            if freq <= 0:
                raise ValueError(f"frequency of {marker!r} must be positive")
            if not marker.startswith(HYPHEN):
                raise ValueError(f"marker {marker!r} must start with a hyphen")
            reason = check_syllable(marker)
            if reason:
                raise ValueError(reason)
        return v


TAG_PATTERN = re.compile(r"^(S[SC]*)?$")


class TagSequence(BaseModel):
    """Per-letter S/C labels, hyphens excluded."""

    model_config = ConfigDict(frozen=True)

    tags: str

    @field_validator("tags")
    @classmethod
    def validate_tags(cls, v: str) -> str:
        if not TAG_PATTERN.match(v):
            raise ValueError(f"tags must be over {{S, C}} and start with S, got {v!r}")
        return v

    @property
    def aligned_length(self) -> int:
        return len(self.tags)

    def __str__(self) -> str:
        return self.tags


class CvPattern(BaseModel):
    """Consonant/vowel template per syllable."""

    model_config = ConfigDict(frozen=True)

    templates: Tuple[str, ...]

    def __str__(self) -> str:
        return " ".join(self.templates)


class PositionalStats(BaseModel):
    """CV-template counts split by syllable position in the word."""
    beginning: Dict[str, int] = Field(default_factory=dict)
    middle: Dict[str, int] = Field(default_factory=dict)
    end: Dict[str, int] = Field(default_factory=dict)


class ClusterRule(BaseModel):
    """Permitted plosive + trill onset clusters."""

    model_config = ConfigDict(frozen=True)

    clusters: FrozenSet[str] = frozenset({"pr", "phr", "kr", "khr"})


class SyllableInventory(BaseModel):
    """Known syllables used by the longest-match baseline."""

    model_config = ConfigDict(frozen=True)

    syllables: FrozenSet[str] = Field(..., min_length=1)

    @field_validator("syllables")
    @classmethod
    def validate_entries(cls, v: FrozenSet[str]) -> FrozenSet[str]:
        for syllable in v:
            if not syllable or syllable.endswith(HYPHEN):
                raise ValueError(f"invalid inventory entry {syllable!r}")
        return v

    @property
    def max_len(self) -> int:
        return max(len(s) for s in self.syllables)
