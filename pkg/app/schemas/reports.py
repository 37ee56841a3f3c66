"""
Pydantic schemas for evaluation reports, attention traces and run manifests
"""

from datetime import datetime
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

ROW_SUM_TOLERANCE = 1e-9


class EvalItem(BaseModel):
    """One test word with its gold tags and the raw predicted tag string."""
    word: str = Field(..., min_length=1)
    gold: str
    predicted: str

    @property
    def correct(self) -> bool:
        return self.predicted == self.gold


class ErrorRow(BaseModel):
    """A misclassified word, laid out for error analysis."""
    word: str
    parse: str
    cv_pattern: str
    actual: str
    predicted: str


class EvalReport(BaseModel):
    """Word-level accuracy of one model over one test set."""
    model: str = "unknown"
    total: int = Field(..., ge=0)
    correct: int = Field(..., ge=0)
    accuracy: float = Field(..., ge=0, le=100)
    errors: List[ErrorRow] = Field(default_factory=list)
    items: List[EvalItem] = Field(default_factory=list)
    failed: int = Field(0, ge=0)
    ambiguous: int = Field(0, ge=0)

    @model_validator(mode="after")
    def check_counts(self) -> "EvalReport":
        if self.correct > self.total:
            raise ValueError(f"correct ({self.correct}) exceeds total ({self.total})")
        return self


class ComparisonRow(BaseModel):
    """A word at least one model got wrong, with every model's output."""
    word: str
    gold: str
    predictions: Dict[str, str]
    correct: Dict[str, bool]


class AttentionTrace(BaseModel):
    """Decoder-step x source-character attention weights for one word."""
    word: str
    source: List[str]
    targets: List[str]
    weights: List[List[float]]

    @model_validator(mode="after")
    def check_rows(self) -> "AttentionTrace":
        if len(self.weights) != len(self.targets):
            raise ValueError("one weight row per emitted symbol is required")
        for row in self.weights:
            if len(row) != len(self.source):
                raise ValueError("weight rows must cover every source character")
            if min(row, default=0.0) < 0 or abs(sum(row) - 1.0) > ROW_SUM_TOLERANCE:
                raise ValueError("attention rows must be probability distributions")
        return self


class RunManifest(BaseModel):
    """Everything needed to reproduce one artifact-producing command."""
    command: str
    config: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    inputs: Dict[str, str] = Field(default_factory=dict)
    outputs: List[str] = Field(default_factory=list)
    toolkit_version: str
    wall_time_s: float = Field(0.0, ge=0)
    created_at: datetime = Field(default_factory=datetime.now)
