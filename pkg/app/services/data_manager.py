"""
Data Manager Service for writing run artifacts (CSV, JSON, corpora, checkpoints)
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from app.nn.checkpoint import ModelCheckpoint, save_checkpoint
from app.parsers.corpus_parser import format_corpus, format_inventory
from app.schemas.reports import AttentionTrace, ComparisonRow, EvalReport, RunManifest
from app.schemas.schemas import SyllabifiedWord, SyllableInventory
from app.schemas.training import METRICS_COLUMNS, TrainingHistory

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
ERROR_COLUMNS = ("word", "parse", "cv_pattern", "actual", "predicted")


class DataManager:
    """Writes every artifact of one run into its output directory and remembers what it wrote."""

    def __init__(self, out_dir: Union[str, Path]):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.outputs: List[str] = []

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def _track(self, path: Path) -> str:
        self.outputs.append(path.name)
        logger.debug("Wrote %s", path)
        return path.name

    def write_json(self, name: str, data: Any) -> str:
        path = self.path(name)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2, ensure_ascii=False, default=str)
            f.write("\n")
        return self._track(path)

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        path = self.path(name)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        return self._track(path)

    def write_text(self, name: str, text: str) -> str:
        path = self.path(name)
        path.write_text(text, encoding="utf-8")
        return self._track(path)

    def save_counts(self, name: str, key: str, counts: Union[Dict[Any, int], List[Tuple[Any, int]]]) -> str:
        """Two-column frequency table."""
        items = counts.items() if isinstance(counts, dict) else counts
        return self.write_csv(name, (key, "count"), items)

    def save_corpus(self, name: str, words: Iterable[SyllabifiedWord]) -> str:
        return self.write_text(name, format_corpus(words))

    def save_inventory(self, name: str, inventory: SyllableInventory) -> str:
        return self.write_text(name, format_inventory(inventory))

    def save_checkpoint(self, name: str, checkpoint: ModelCheckpoint) -> str:
        return self._track(save_checkpoint(checkpoint, self.path(name)))

    def save_metrics(self, history: TrainingHistory, name: str = "metrics.csv") -> str:
        rows = ([getattr(m, column) for column in METRICS_COLUMNS] for m in history.epochs)
        return self.write_csv(name, METRICS_COLUMNS, rows)

    def save_eval_report(self, report: EvalReport, prefix: Optional[str] = None) -> Tuple[str, str]:
        """Full report as JSON plus the error rows as CSV."""
        prefix = prefix or report.model
        json_name = self.write_json(f"{prefix}_report.json", report.model_dump(mode="json"))
        csv_name = self.write_csv(
            f"{prefix}_errors.csv",
            ERROR_COLUMNS,
            ([getattr(row, c) for c in ERROR_COLUMNS] for row in report.errors),
        )
        return json_name, csv_name

    def save_comparison(self, rows: List[ComparisonRow], models: Sequence[str], name: str = "comparison.csv") -> str:
        """One predicted column and one boolean correct column per model."""
        header = ["word", "gold"]
        for model in models:
            header += [f"{model}", f"{model}_correct"]
        body = []
        for row in rows:
            line = [row.word, row.gold]
            for model in models:
                line += [row.predictions[model], str(row.correct[model]).lower()]
            body.append(line)
        return self.write_csv(name, header, body)

    def save_attention_trace(self, trace: AttentionTrace, name: str) -> str:
        """Matrix CSV: source characters as column headers, emitted symbols as row headers."""
        rows = ([target] + [repr(w) for w in weights] for target, weights in zip(trace.targets, trace.weights))
        return self.write_csv(name, ["tag"] + trace.source, rows)

    def write_manifest(self, manifest: RunManifest) -> Path:
        manifest = manifest.model_copy(update={"outputs": list(self.outputs)})
        path = self.path(MANIFEST_NAME)
        path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
        logger.info("Run manifest written to %s", path)
        return path


def load_eval_report(path: Union[str, Path]) -> EvalReport:
    with open(path, "r", encoding="utf-8") as f:
        return EvalReport.model_validate(json.load(f))
