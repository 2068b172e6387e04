"""Per-line multiclass metrics and run-level reporting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .corpus import CodeFile
from .errors import EmptyMatrix, InvalidGold, LengthMismatch, MissingPredictions
from .labels import GOLD_LABELS, PRED_LABELS, Label
from .segment import consolidate, segment_count_stats

_GOLD_INDEX = {label: i for i, label in enumerate(GOLD_LABELS)}
_PRED_INDEX = {label: i for i, label in enumerate(PRED_LABELS)}


@dataclass(frozen=True)
class ConfusionMatrix:
    """Gold (7 rows) by predicted (7 classes + Invalid column) tallies."""

    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def invalid_count(self) -> int:
        return int(self.counts[:, _PRED_INDEX[Label.INVALID]].sum())

    def as_lists(self) -> list[list[int]]:
        return self.counts.astype(int).tolist()


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    per_class: Mapping[Label, ClassMetrics]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    micro_f1: float
    line_count: int
    invalid_count: int


def confusion(gold: Sequence[Label], pred: Sequence[Label]) -> ConfusionMatrix:
    """Tally gold/predicted pairs; INVALID predictions land in their own column."""
    if len(gold) != len(pred):
        raise LengthMismatch(f"{len(gold)} gold labels vs {len(pred)} predictions")
    counts = np.zeros((len(GOLD_LABELS), len(PRED_LABELS)), dtype=np.int64)
    for g, p in zip(gold, pred):
        if g is Label.INVALID:
            raise InvalidGold("gold labels must never be Invalid")
        counts[_GOLD_INDEX[g], _PRED_INDEX[p]] += 1
    return ConfusionMatrix(counts)


def _safe_div(num: float, den: float) -> float:
    # Zero-denominator convention: define the ratio as 0.
    return num / den if den else 0.0


def metrics(matrix: ConfusionMatrix) -> MetricsReport:
    """Accuracy, per-class and macro P/R/F1, micro F1 from a confusion matrix.

    INVALID predictions are never correct: they contribute false-negative
    mass to their gold class and true-positive mass to nothing. Macro
    values average the classes with gold support in the matrix (all seven
    on corpus-scale data). Micro F1 equals accuracy for single-label
    classification and is asserted as such.
    """
    counts = matrix.counts
    total = int(counts.sum())
    if total == 0:
        raise EmptyMatrix("confusion matrix has no observations")

    per_class: dict[Label, ClassMetrics] = {}
    supported: list[ClassMetrics] = []
    correct = 0
    for label, i in _GOLD_INDEX.items():
        tp = int(counts[i, i])
        support = int(counts[i, :].sum())
        predicted = int(counts[:, i].sum())
        precision = _safe_div(tp, predicted)
        recall = _safe_div(tp, support)
        f1 = _safe_div(2 * precision * recall, precision + recall)
        cm = ClassMetrics(precision, recall, f1, support)
        per_class[label] = cm
        if support:
            supported.append(cm)
        correct += tp

    accuracy = correct / total
    micro_f1 = correct / total  # micro P = micro R = accuracy here
    assert abs(micro_f1 - accuracy) < 1e-12
    k = len(supported)
    return MetricsReport(
        accuracy=accuracy,
        per_class=per_class,
        macro_precision=sum(c.precision for c in supported) / k,
        macro_recall=sum(c.recall for c in supported) / k,
        macro_f1=sum(c.f1 for c in supported) / k,
        micro_f1=micro_f1,
        line_count=total,
        invalid_count=matrix.invalid_count,
    )


def evaluate_run(
    files: Sequence[CodeFile],
    predictions: Mapping[str, Sequence[Label]],
    mode: str,
    *,
    run_id: str = "",
    backend: str = "",
    context_c: int | None = None,
    config_hash: str = "",
    template_hash: str = "",
) -> tuple[MetricsReport, dict]:
    """Aggregate per-line metrics across files and build the report payload.

    Every file needs gold labels on every line and a prediction sequence of
    matching length. The report dict is JSON-ready: metrics, the full
    confusion matrix, per-file segment counts, and (with two or more files)
    the segment-count MAE/STD.
    """
    gold_all: list[Label] = []
    pred_all: list[Label] = []
    per_file: list[dict] = []
    gold_counts: list[int] = []
    pred_counts: list[int] = []

    for file in files:
        preds = predictions.get(file.file_id)
        if preds is None or len(preds) != len(file):
            got = 0 if preds is None else len(preds)
            raise MissingPredictions(
                f"{file.file_id}: {got} predictions for {len(file)} lines"
            )
        gold = []
        for line in file.lines:
            if line.gold is None:
                raise MissingPredictions(
                    f"{file.file_id}:{line.line_no}: no gold label to score against"
                )
            gold.append(line.gold)
        gold_all.extend(gold)
        pred_all.extend(preds)
        n_gold_segments = len(consolidate(gold))
        n_pred_segments = len(consolidate(list(preds)))
        gold_counts.append(n_gold_segments)
        pred_counts.append(n_pred_segments)
        per_file.append(
            {
                "file_id": file.file_id,
                "line_count": len(file),
                "segment_count_gold": n_gold_segments,
                "segment_count_pred": n_pred_segments,
            }
        )

    matrix = confusion(gold_all, pred_all)
    report = metrics(matrix)
    payload = {
        "run_id": run_id,
        "mode": mode,
        "backend": backend,
        "context_c": context_c,
        "config_hash": config_hash,
        "template_hash": template_hash,
        "metrics": {
            "accuracy": report.accuracy,
            "macro_precision": report.macro_precision,
            "macro_recall": report.macro_recall,
            "macro_f1": report.macro_f1,
            "micro_f1": report.micro_f1,
            "line_count": report.line_count,
            "invalid_count": report.invalid_count,
            "per_class": {
                label.display: {
                    "precision": cm.precision,
                    "recall": cm.recall,
                    "f1": cm.f1,
                    "support": cm.support,
                }
                for label, cm in report.per_class.items()
            },
        },
        "confusion": matrix.as_lists(),
        "confusion_gold_order": [l.display for l in GOLD_LABELS],
        "confusion_pred_order": [l.display for l in PRED_LABELS],
        "per_file": per_file,
    }
    if len(files) >= 2:
        stats = segment_count_stats(gold_counts, pred_counts)
        payload["segment_count_stats"] = {"mae": stats.mae, "std": stats.std}
    return report, payload
