"""Whole-file range segmentation: encoding, parsing, validation, repair."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Sequence

from .corpus import CodeFile
from .errors import CoverageViolation, NoRangesFound, ValidationFailed
from .labels import Label, normalize_label
from .prompts import DEFAULT_RANGE_DETAILS, LABEL_DEFINITIONS, RANGE_PROMPT_TEMPLATE

REPAIR_POLICIES = ("strict", "first_wins_fill_invalid")


@dataclass(frozen=True)
class RangeSpan:
    """An inclusive line interval carrying one label."""

    start: int
    end: int
    label: Label

    def __post_init__(self) -> None:
        if not 1 <= self.start <= self.end:
            raise ValueError(f"bad range bounds [{self.start}-{self.end}]")

    def format(self) -> str:
        return f"Range [{self.start}-{self.end}] for {self.label.display}"


@dataclass(frozen=True)
class RangeValidation:
    """Coverage defects of a span set against a file of n lines."""

    gaps: tuple[tuple[int, int], ...]
    overlaps: tuple[tuple[int, int], ...]
    out_of_bounds: tuple[RangeSpan, ...]

    @property
    def ok(self) -> bool:
        return not (self.gaps or self.overlaps or self.out_of_bounds)


@dataclass(frozen=True)
class ParsedRanges:
    """Spans recovered from a model response plus the lines that parsed to nothing."""

    spans: tuple[RangeSpan, ...]
    failures: tuple[str, ...]


def encode_lines(file: CodeFile) -> str:
    """Strict JSON array of ``{"line": n, "code": s}`` objects, one per line.

    Round-trips losslessly through json.loads.
    """
    body = ",\n".join(
        json.dumps({"line": line.line_no, "code": line.code}, ensure_ascii=False)
        for line in file.lines
    )
    return "[\n" + body + "\n]"


def render_range_prompt(
    file: CodeFile, important_details: str = DEFAULT_RANGE_DETAILS
) -> str:
    """Whole-file prompt: role, input description, tasks, labels, payload.

    An empty ``important_details`` omits that section cleanly.
    """
    details = (
        f"# Important Details:\n{important_details}\n\n" if important_details else ""
    )
    return RANGE_PROMPT_TEMPLATE.format(
        labels=LABEL_DEFINITIONS,
        important_details=details,
        payload=encode_lines(file),
    )


# One production per non-empty output line:
#   ("Range" WS)? "[" INT "-" INT "]" (":" | WS "for")? WS LABELTEXT
_RANGE_LINE_RE = re.compile(
    r"""^\s*
        (?:range\s+)?
        \[\s*(\d+)\s*-\s*(\d+)\s*\]
        (?:\s*:\s*|\s+for\s+|\s+)
        (.+?)\s*$""",
    re.IGNORECASE | re.VERBOSE,
)


def parse_ranges(text: str) -> ParsedRanges:
    """Tolerant parse of range output, one production per non-empty line.

    Accepts "Range [a-b] for Label", "Range [a-b] Label", and "[a-b]: Label"
    forms; label text goes through normalize_label, so an unrecognizable
    label yields an INVALID-labeled span rather than a parse failure.
    Reversed or zero bounds fail the line. Raises NoRangesFound when no
    line yields a span.
    """
    spans: list[RangeSpan] = []
    failures: list[str] = []
    for line in text.splitlines():
        if not line.strip():
            continue
        match = _RANGE_LINE_RE.match(line)
        if match is None:
            failures.append(line)
            continue
        start, end = int(match.group(1)), int(match.group(2))
        if not 1 <= start <= end:
            failures.append(line)
            continue
        spans.append(RangeSpan(start, end, normalize_label(match.group(3))))
    if not spans:
        raise NoRangesFound(
            f"no line ranges found in response ({len(failures)} unparsed lines)"
        )
    return ParsedRanges(spans=tuple(spans), failures=tuple(failures))


def _intervals(line_numbers: list[int]) -> tuple[tuple[int, int], ...]:
    out: list[tuple[int, int]] = []
    for n in line_numbers:
        if out and n == out[-1][1] + 1:
            out[-1] = (out[-1][0], n)
        else:
            out.append((n, n))
    return tuple(out)


def validate_ranges(spans: Sequence[RangeSpan], n: int) -> RangeValidation:
    """Gaps, overlaps, and bound violations of ``spans`` against 1..n."""
    if n < 1:
        raise ValueError(f"file length must be >= 1, got {n}")
    coverage = [0] * (n + 1)
    out_of_bounds = []
    for span in spans:
        if span.start < 1 or span.end > n:
            out_of_bounds.append(span)
        for line in range(max(1, span.start), min(n, span.end) + 1):
            coverage[line] += 1
    return RangeValidation(
        gaps=_intervals([i for i in range(1, n + 1) if coverage[i] == 0]),
        overlaps=_intervals([i for i in range(1, n + 1) if coverage[i] >= 2]),
        out_of_bounds=tuple(out_of_bounds),
    )


def repair_ranges(
    spans: Sequence[RangeSpan], n: int, policy: str = "first_wins_fill_invalid"
) -> list[RangeSpan]:
    """Force a span set into full disjoint coverage of 1..n.

    strict: raise ValidationFailed on any defect, otherwise return the
    spans unchanged. first_wins_fill_invalid: overlapping lines go to the
    earliest-listed span, out-of-bounds spans are clipped, and uncovered
    runs are filled with INVALID spans, so per-line evaluation is always
    defined.
    """
    if policy not in REPAIR_POLICIES:
        raise ValueError(f"unknown repair policy {policy!r}")
    validation = validate_ranges(spans, n)
    if policy == "strict":
        if not validation.ok:
            raise ValidationFailed(
                f"gaps={list(validation.gaps)} overlaps={list(validation.overlaps)} "
                f"out_of_bounds={len(validation.out_of_bounds)}"
            )
        return list(spans)

    owner: list[int | None] = [None] * (n + 1)
    for index, span in enumerate(spans):
        for line in range(max(1, span.start), min(n, span.end) + 1):
            if owner[line] is None:
                owner[line] = index
    repaired: list[RangeSpan] = []
    run_start = 1
    for line in range(2, n + 2):
        if line == n + 1 or owner[line] != owner[run_start]:
            idx = owner[run_start]
            label = Label.INVALID if idx is None else spans[idx].label
            repaired.append(RangeSpan(run_start, line - 1, label))
            run_start = line
    return repaired


def expand_to_lines(spans: Sequence[RangeSpan]) -> list[Label]:
    """Per-line labels from spans that cover 1..n exactly once."""
    if not spans:
        raise CoverageViolation("no spans to expand")
    n = max(span.end for span in spans)
    labels: list[Label | None] = [None] * n
    for span in spans:
        for line in range(span.start, span.end + 1):
            if labels[line - 1] is not None:
                raise CoverageViolation(f"line {line} covered more than once")
            labels[line - 1] = span.label
    missing = [i + 1 for i, lab in enumerate(labels) if lab is None]
    if missing:
        raise CoverageViolation(f"lines not covered: {missing[:10]}")
    return labels  # type: ignore[return-value]
