"""Consolidate per-line labels into segments; segment-count statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyInput, LengthMismatch, TooFewFiles
from .labels import Label


@dataclass(frozen=True)
class Segment:
    """A maximal run of consecutive lines sharing one label (inclusive)."""

    start: int
    end: int
    label: Label

    def __post_init__(self) -> None:
        if not 1 <= self.start <= self.end:
            raise ValueError(f"bad segment bounds [{self.start}-{self.end}]")


@dataclass(frozen=True)
class SegmentCountStats:
    """Per-file absolute count differences with their mean and spread.

    ``std`` is the sample standard deviation (n - 1 denominator).
    """

    abs_differences: tuple[int, ...]
    mae: float
    std: float


def consolidate(labels: Sequence[Label]) -> list[Segment]:
    """Blend consecutive equal labels into segments, order preserved.

    INVALID participates like any label, so segment counts stay defined for
    degraded backends. Adjacent segments always differ in label and the
    segments exactly cover 1..n.
    """
    if not labels:
        raise EmptyInput("cannot consolidate an empty label sequence")
    segments: list[Segment] = []
    start = 1
    for i in range(1, len(labels) + 1):
        if i == len(labels) or labels[i] != labels[i - 1]:
            segments.append(Segment(start=start, end=i, label=labels[i - 1]))
            start = i + 1
    return segments


def segment_count_stats(
    gold_counts: Sequence[int], pred_counts: Sequence[int]
) -> SegmentCountStats:
    """MAE and sample standard deviation of per-file |gold - pred| counts."""
    if len(gold_counts) != len(pred_counts):
        raise LengthMismatch(
            f"{len(gold_counts)} gold counts vs {len(pred_counts)} predicted"
        )
    if len(gold_counts) < 2:
        raise TooFewFiles("sample standard deviation needs at least 2 files")
    diffs = tuple(abs(g - p) for g, p in zip(gold_counts, pred_counts))
    mae = sum(diffs) / len(diffs)
    variance = sum((d - mae) ** 2 for d in diffs) / (len(diffs) - 1)
    return SegmentCountStats(abs_differences=diffs, mae=mae, std=math.sqrt(variance))
