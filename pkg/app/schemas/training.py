"""
Pydantic schemas for training runs
"""

from typing import List, Literal

from pydantic import BaseModel, Field, model_validator

METRICS_COLUMNS = ("epoch", "train_loss", "train_acc", "valid_loss", "valid_acc", "valid_word_acc")


class TrainConfig(BaseModel):
    """Hyperparameters for one training run."""
    epochs: int = Field(40, gt=0)
    batch_size: int = Field(128, gt=0)
    learning_rate: float = Field(0.001, gt=0)
    optimizer: Literal["adam"] = "adam"
    embedding_dim: int = Field(128, gt=0)
    hidden_dim: int = Field(256, gt=0)
    units: int = Field(512, gt=0)
    seed: int = Field(42, ge=0)


class EpochMetrics(BaseModel):
    """One row of the learning curve."""
    epoch: int = Field(..., ge=1)
    train_loss: float
    train_acc: float = Field(..., ge=0, le=1)
    valid_loss: float
    valid_acc: float = Field(..., ge=0, le=1)
    valid_word_acc: float = Field(..., ge=0, le=1)


class TrainingHistory(BaseModel):
    """Per-epoch metrics and the epoch whose weights were kept."""
    epochs: List[EpochMetrics] = Field(default_factory=list)
    best_epoch: int = 0

    @model_validator(mode="after")
    def check_best(self) -> "TrainingHistory":
        if self.epochs and not any(m.epoch == self.best_epoch for m in self.epochs):
            raise ValueError(f"best epoch {self.best_epoch} not in history")
        return self

    @property
    def best(self) -> EpochMetrics:
        return next(m for m in self.epochs if m.epoch == self.best_epoch)
