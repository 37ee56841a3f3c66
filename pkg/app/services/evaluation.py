"""
Word-level accuracy, error analysis and cross-model comparison
"""

import logging
from decimal import ROUND_HALF_UP, Decimal
from typing import Dict, List, Sequence

from app.core.errors import ReportMismatchError
from app.schemas.reports import ComparisonRow, ErrorRow, EvalItem, EvalReport
from app.schemas.schemas import SyllabifiedWord, SyllableInventory
from app.services.baseline import is_ambiguous, segment
from app.services.phonotactics import cv_pattern
from app.services.tagging import encode_tags

logger = logging.getLogger(__name__)


def accuracy_percent(correct: int, total: int) -> float:
    """100 * correct / total, rounded half-up to 2 decimals (0.0 for an empty set)."""
    if total == 0:
        return 0.0
    value = Decimal(100 * correct) / Decimal(total)
    return float(value.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _items(predictions: Sequence[str], golds: Sequence[SyllabifiedWord]) -> List[EvalItem]:
    if len(predictions) != len(golds):
        raise ReportMismatchError(f"{len(predictions)} predictions for {len(golds)} gold words")
    return [
        EvalItem(word=gold.surface, gold=encode_tags(gold).tags, predicted=pred)
        for pred, gold in zip(predictions, golds)
    ]


def error_rows(predictions: Sequence[str], golds: Sequence[SyllabifiedWord]) -> List[ErrorRow]:
    """One row per word whose raw predicted tag string differs from gold."""
    rows = []
    for item, gold in zip(_items(predictions, golds), golds):
        if item.correct:
            continue
        rows.append(ErrorRow(
            word=item.word,
            parse="+".join(gold.syllables),
            cv_pattern=str(cv_pattern(gold)),
            actual=item.gold,
            predicted=item.predicted,
        ))
    return rows


def word_accuracy(
    predictions: Sequence[str], golds: Sequence[SyllabifiedWord], model: str = "unknown"
) -> EvalReport:
    """
    A word is correct iff its predicted tag string equals the gold string
    exactly. Predictions of the wrong length (possible for the
    encoder-decoder) are errors, never fitted.
    """
    items = _items(predictions, golds)
    correct = sum(1 for item in items if item.correct)
    report = EvalReport(
        model=model,
        total=len(items),
        correct=correct,
        accuracy=accuracy_percent(correct, len(items)),
        errors=error_rows(predictions, golds),
        items=items,
    )
    logger.info("%s: %d/%d words correct (%.2f%%)", model, correct, len(items), report.accuracy)
    return report


def evaluate_baseline(inventory: SyllableInventory, golds: Sequence[SyllabifiedWord]) -> EvalReport:
    """Longest-match baseline report; failures and ambiguous surfaces are counted separately."""
    predictions = []
    failed = ambiguous = 0
    for gold in golds:
        parsed = segment(gold.surface, inventory)
        if parsed is None:
            failed += 1
            predictions.append("")
            continue
        if is_ambiguous(gold.surface, inventory):
            ambiguous += 1
        predictions.append(encode_tags(parsed).tags)
    if failed:
        logger.warning("Baseline could not segment %d of %d words", failed, len(golds))
    report = word_accuracy(predictions, golds, model="baseline")
    return report.model_copy(update={"failed": failed, "ambiguous": ambiguous})


def compare_models(reports: Dict[str, EvalReport]) -> List[ComparisonRow]:
    """Rows for every word at least one model got wrong, with per-model correctness flags."""
    if len(reports) < 2:
        raise ReportMismatchError("comparison needs at least two reports")
    names = list(reports)
    reference = [(item.word, item.gold) for item in reports[names[0]].items]
    for name in names[1:]:
        if [(item.word, item.gold) for item in reports[name].items] != reference:
            raise ReportMismatchError(f"{name} was evaluated on a different test set than {names[0]}")

    rows = []
    for i, (word, gold) in enumerate(reference):
        predictions = {name: reports[name].items[i].predicted for name in names}
        correct = {name: pred == gold for name, pred in predictions.items()}
        if all(correct.values()):
            continue
        rows.append(ComparisonRow(word=word, gold=gold, predictions=predictions, correct=correct))
    return rows
