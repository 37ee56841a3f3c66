"""
Self-describing checkpoint container.

Layout: 8-byte magic, little-endian uint64 header length, UTF-8 JSON header,
then every tensor as little-endian float64 in header order. The header holds
the format version, architecture tag, vocabulary, hyperparameters, free-form
metadata and a table of (name, shape, offset, count) with offsets in elements.
"""

import json
import logging
import struct
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.core.errors import CheckpointError, VocabularyMismatchError
from app.nn.seq2seq import Seq2SeqModel
from app.nn.tagger import SequenceTagger
from app.schemas.schemas import ModelKind

logger = logging.getLogger(__name__)

MAGIC = b"TNYDCKPT"
FORMAT_VERSION = 1
_LENGTH = struct.Struct("<Q")
_DTYPE = np.dtype("<f8")

NeuralModel = Union[SequenceTagger, Seq2SeqModel]


class ModelCheckpoint(BaseModel):
    """Trained weights plus everything needed to rebuild the network."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    architecture: ModelKind
    vocabulary: List[str]
    hyperparameters: Dict[str, Any] = Field(default_factory=dict)
    metadata: Dict[str, Any] = Field(default_factory=dict)
    tensors: Dict[str, np.ndarray] = Field(default_factory=dict)
    format_version: int = FORMAT_VERSION


def checkpoint_from_model(
    model: NeuralModel, kind: ModelKind, vocabulary: List[str], metadata: Optional[Dict[str, Any]] = None
) -> ModelCheckpoint:
    return ModelCheckpoint(
        architecture=kind,
        vocabulary=list(vocabulary),
        hyperparameters=model.hyperparameters,
        metadata=dict(metadata or {}),
        tensors={name: value.copy() for name, value in model.named_parameters().items()},
    )


def model_from_checkpoint(checkpoint: ModelCheckpoint) -> NeuralModel:
    """Rebuild the network and load its weights."""
    hp = dict(checkpoint.hyperparameters)
    if checkpoint.architecture == ModelKind.SEQ2SEQ:
        model: NeuralModel = Seq2SeqModel(**hp)
        vocab_size = model.source_vocab_size
    elif checkpoint.architecture == ModelKind.BASELINE:
        raise CheckpointError("baseline inventories are not neural checkpoints")
    else:
        model = SequenceTagger(checkpoint.architecture, **hp)
        vocab_size = model.vocab_size
    if len(checkpoint.vocabulary) != vocab_size:
        raise VocabularyMismatchError(
            f"checkpoint vocabulary has {len(checkpoint.vocabulary)} entries, model expects {vocab_size}"
        )
    try:
        model.load_parameters(checkpoint.tensors)
    except (KeyError, ValueError) as e:
        raise CheckpointError(f"checkpoint tensors do not fit {checkpoint.architecture.value}: {e}") from e
    return model


def save_checkpoint(checkpoint: ModelCheckpoint, path: Union[str, Path]) -> Path:
    path = Path(path)
    table = []
    offset = 0
    for name, value in checkpoint.tensors.items():
        table.append({"name": name, "shape": list(value.shape), "offset": offset, "count": int(value.size)})
        offset += int(value.size)
    header = {
        "format_version": checkpoint.format_version,
        "architecture": checkpoint.architecture.value,
        "vocabulary": checkpoint.vocabulary,
        "hyperparameters": checkpoint.hyperparameters,
        "metadata": checkpoint.metadata,
        "tensors": table,
    }
    header_bytes = json.dumps(header, ensure_ascii=False, sort_keys=True).encode("utf-8")

    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(_LENGTH.pack(len(header_bytes)))
        f.write(header_bytes)
        for value in checkpoint.tensors.values():
            f.write(np.ascontiguousarray(value, dtype=_DTYPE).tobytes())
    logger.info("Saved %s checkpoint (%d tensors) to %s", checkpoint.architecture.value, len(table), path)
    return path


def is_checkpoint_file(path: Union[str, Path]) -> bool:
    with open(path, "rb") as f:
        return f.read(len(MAGIC)) == MAGIC


def load_checkpoint(path: Union[str, Path]) -> ModelCheckpoint:
    blob = Path(path).read_bytes()
    if blob[:len(MAGIC)] != MAGIC:
        raise CheckpointError(f"{path} is not a checkpoint file")
    start = len(MAGIC) + _LENGTH.size
    if len(blob) < start:
        raise CheckpointError(f"{path} is truncated")
    (header_len,) = _LENGTH.unpack_from(blob, len(MAGIC))
    try:
        header = json.loads(blob[start:start + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"{path} has a corrupt header: {e}") from e
    if header.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint format version {header.get('format_version')}")

    data_start = start + header_len
    tensors = {}
    for entry in header["tensors"]:
        begin = data_start + entry["offset"] * _DTYPE.itemsize
        end = begin + entry["count"] * _DTYPE.itemsize
        if end > len(blob):
            raise CheckpointError(f"{path} is truncated in tensor {entry['name']}")
        flat = np.frombuffer(blob, dtype=_DTYPE, count=entry["count"], offset=begin)
        tensors[entry["name"]] = flat.astype(np.float64).reshape(entry["shape"])

    logger.debug("Loaded %s checkpoint from %s", header["architecture"], path)
    return ModelCheckpoint(
        architecture=ModelKind(header["architecture"]),
        vocabulary=header["vocabulary"],
        hyperparameters=header["hyperparameters"],
        metadata=header["metadata"],
        tensors=tensors,
        format_version=header["format_version"],
    )
