"""
Exception hierarchy shared by the parsers, services and the numerical core
"""

from typing import Optional


class ToolkitError(Exception):
    """Base class for every error raised by the toolkit."""


class CorpusValidationError(ToolkitError, ValueError):
    """A corpus line violates the syllabified corpus format."""

    def __init__(self, message: str, line: Optional[int] = None, character: Optional[str] = None):
        self.line = line
        self.character = character
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class TaggingError(ToolkitError, ValueError):
    """S/C tag sequence cannot be produced or applied."""


class SegmentationError(ToolkitError, ValueError):
    """Surface form cannot be segmented."""


class VocabularyMismatchError(ToolkitError, ValueError):
    """Input characters or checkpoint vocabulary do not line up."""


class ReportMismatchError(ToolkitError, ValueError):
    """Evaluation inputs are not aligned over the same words."""


class NonFiniteError(ToolkitError, RuntimeError):
    """A NaN or infinity showed up in a forward pass or gradient."""

    def __init__(self, message: str, step: Optional[int] = None):
        self.step = step
        suffix = f" at step {step}" if step is not None else ""
        super().__init__(f"{message}{suffix}")


class TrainingDivergedError(ToolkitError, RuntimeError):
    """Loss became non-finite during training."""

    def __init__(self, epoch: int, loss: float):
        self.epoch = epoch
        self.loss = loss
        super().__init__(f"training diverged at epoch {epoch} (loss={loss})")


class CheckpointError(ToolkitError, RuntimeError):
    """Checkpoint file is unreadable or malformed."""
