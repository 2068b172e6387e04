"""Load, validate, and summarize annotated corpora; adjudicate annotator labels."""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence, Union

from .errors import (
    EmptyCorpus,
    EmptyMatrix,
    MalformedRecord,
    RaggedMatrix,
    TooFewAnnotators,
    UnknownLabel,
)
from .labels import GOLD_LABELS, Label, gold_label_from_display
from .preprocess import tokenize

SPLITS = ("train", "val", "test")
LANGUAGES = ("R", "Python")


@dataclass(frozen=True)
class LabeledLine:
    """One source line with its position, token count, and labels."""

    line_no: int
    code: str
    token_count: int
    gold: Label | None = None
    annotator_labels: tuple[Label, ...] | None = None

    def __post_init__(self) -> None:
        if self.line_no < 1:
            raise MalformedRecord(f"line_no must be >= 1, got {self.line_no}")
        if self.token_count < 0:
            raise MalformedRecord("token_count must be non-negative")
        if self.gold is Label.INVALID:
            raise UnknownLabel("'Invalid' is not an annotatable label")


@dataclass(frozen=True)
class CodeFile:
    """An ordered, contiguously numbered source file."""

    file_id: str
    language: str
    split: str
    lines: tuple[LabeledLine, ...]

    def __post_init__(self) -> None:
        if not self.lines:
            raise MalformedRecord(f"{self.file_id}: file has no lines")
        numbers = [line.line_no for line in self.lines]
        if numbers != list(range(1, len(numbers) + 1)):
            raise MalformedRecord(
                f"{self.file_id}: line numbers must be exactly 1..{len(numbers)}"
            )

    def __len__(self) -> int:
        return len(self.lines)


class _Conflict:
    """Sentinel returned by majority_vote when no strict majority exists."""

    _instance = None

    def __new__(cls) -> "_Conflict":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Conflict"


CONFLICT = _Conflict()

VoteResult = Union[Label, _Conflict]


@dataclass(frozen=True)
class SplitStats:
    line_count: int
    file_count: int
    avg_lines_per_file: float
    avg_tokens_per_line: float


@dataclass(frozen=True)
class CorpusStats:
    """Per-split statistics plus two aggregate conventions.

    ``aggregate`` divides corpus totals (total lines / total files, total
    tokens / total lines). ``split_mean_lines_per_file`` and
    ``split_mean_tokens_per_line`` are the unweighted means of the split
    averages instead; both are reported because neither convention can be
    derived from the other.
    """

    per_split: Mapping[str, SplitStats]
    aggregate: SplitStats
    split_mean_lines_per_file: float
    split_mean_tokens_per_line: float


@dataclass(frozen=True)
class AgreementReport:
    kappa: float
    resolvable_fraction: float
    conflict_lines: tuple[tuple[str, int, tuple[Label, ...]], ...]


_REQUIRED_FIELDS = ("file_id", "language", "split", "line", "code")


def _parse_record(raw: object, where: str) -> dict:
    if not isinstance(raw, dict):
        raise MalformedRecord(f"{where}: record is not a JSON object")
    for name in _REQUIRED_FIELDS:
        if name not in raw:
            raise MalformedRecord(f"{where}: missing field {name!r}")
    if not isinstance(raw["line"], int) or isinstance(raw["line"], bool):
        raise MalformedRecord(f"{where}: 'line' must be an integer")
    if raw["language"] not in LANGUAGES:
        raise MalformedRecord(f"{where}: unknown language {raw['language']!r}")
    if raw["split"] not in SPLITS:
        raise MalformedRecord(f"{where}: unknown split {raw['split']!r}")
    if not isinstance(raw["code"], str):
        raise MalformedRecord(f"{where}: 'code' must be a string")
    return raw


def load_corpus(
    path: str | Path,
    expected_language: str | None = "R",
    tokenizer: Callable[[str], list[str]] = tokenize,
) -> list[CodeFile]:
    """Read a JSONL corpus into validated CodeFile values.

    One JSON object per physical line:
    ``{"file_id", "language", "split", "line", "code", "gold", "annotators"}``
    with labels serialized by canonical display string (exact,
    case-sensitive). Token counts are populated with ``tokenizer``. Files
    are returned sorted by file_id with lines in ascending order; each
    file's line numbers must be exactly 1..n.
    """
    path = Path(path)
    grouped: dict[str, list[dict]] = defaultdict(list)
    with path.open(encoding="utf-8") as fh:
        for lineno, text in enumerate(fh, start=1):
            if not text.strip():
                continue
            where = f"{path.name}:{lineno}"
            try:
                raw = json.loads(text)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(f"{where}: invalid JSON ({exc.msg})") from None
            record = _parse_record(raw, where)
            if expected_language is not None and record["language"] != expected_language:
                raise MalformedRecord(
                    f"{where}: expected language {expected_language!r}, "
                    f"got {record['language']!r}"
                )
            grouped[record["file_id"]].append(record)

    if not grouped:
        raise EmptyCorpus(f"{path}: no records")

    files: list[CodeFile] = []
    for file_id in sorted(grouped):
        records = sorted(grouped[file_id], key=lambda r: r["line"])
        languages = {r["language"] for r in records}
        splits = {r["split"] for r in records}
        if len(languages) > 1 or len(splits) > 1:
            raise MalformedRecord(
                f"{file_id}: records disagree on language or split"
            )
        lines = []
        for record in records:
            gold_raw = record.get("gold")
            gold = gold_label_from_display(gold_raw) if gold_raw is not None else None
            annotators_raw = record.get("annotators")
            annotators = (
                tuple(gold_label_from_display(a) for a in annotators_raw)
                if annotators_raw is not None
                else None
            )
            lines.append(
                LabeledLine(
                    line_no=record["line"],
                    code=record["code"],
                    token_count=len(tokenizer(record["code"])),
                    gold=gold,
                    annotator_labels=annotators,
                )
            )
        files.append(
            CodeFile(
                file_id=file_id,
                language=records[0]["language"],
                split=records[0]["split"],
                lines=tuple(lines),
            )
        )
    return files


def write_corpus(files: Iterable[CodeFile], path: str | Path) -> None:
    """Serialize files back to the JSONL record schema (UTF-8)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for file in files:
            for line in file.lines:
                record = {
                    "file_id": file.file_id,
                    "language": file.language,
                    "split": file.split,
                    "line": line.line_no,
                    "code": line.code,
                    "gold": line.gold.display if line.gold else None,
                    "annotators": (
                        [a.display for a in line.annotator_labels]
                        if line.annotator_labels is not None
                        else None
                    ),
                }
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def _split_stats(files: Sequence[CodeFile]) -> SplitStats:
    line_count = sum(len(f) for f in files)
    token_count = sum(line.token_count for f in files for line in f.lines)
    return SplitStats(
        line_count=line_count,
        file_count=len(files),
        avg_lines_per_file=line_count / len(files),
        avg_tokens_per_line=token_count / line_count if line_count else 0.0,
    )


def corpus_stats(corpus: Sequence[CodeFile]) -> CorpusStats:
    """Line/file/token statistics per split and in aggregate."""
    if not corpus:
        raise EmptyCorpus("cannot summarize an empty corpus")
    by_split: dict[str, list[CodeFile]] = defaultdict(list)
    for file in corpus:
        by_split[file.split].append(file)
    per_split = {
        split: _split_stats(by_split[split]) for split in SPLITS if by_split[split]
    }
    aggregate = _split_stats(list(corpus))
    split_values = list(per_split.values())
    return CorpusStats(
        per_split=per_split,
        aggregate=aggregate,
        split_mean_lines_per_file=sum(s.avg_lines_per_file for s in split_values)
        / len(split_values),
        split_mean_tokens_per_line=sum(s.avg_tokens_per_line for s in split_values)
        / len(split_values),
    )


def majority_vote(labels: Sequence[Label]) -> VoteResult:
    """Label held by a strict majority of annotators, else CONFLICT.

    Requires at least three votes, none of them INVALID. Invariant under
    permutation of the vote order.
    """
    votes = tuple(labels)
    if len(votes) < 3:
        raise TooFewAnnotators(f"need >= 3 annotator labels, got {len(votes)}")
    if any(v is Label.INVALID for v in votes):
        raise UnknownLabel("'Invalid' is not an annotatable label")
    top, count = Counter(votes).most_common(1)[0]
    if 2 * count > len(votes):
        return top
    return CONFLICT


def fleiss_kappa(annotations: Sequence[Sequence[int]]) -> float:
    """Chance-corrected agreement for a constant rater count per item.

    ``annotations[i][j]`` counts the raters who assigned category ``j`` to
    item ``i``; every row must sum to the same rater count n >= 2.

    Degenerate case: when every rater used one single category throughout,
    expected agreement is 1 and the ratio is indeterminate, but observed
    agreement is then also forced to 1, so 1.0 is returned by convention.
    """
    rows = [list(row) for row in annotations]
    if not rows:
        raise EmptyMatrix("agreement matrix has no items")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise RaggedMatrix("rows have differing category counts")
    sums = {sum(row) for row in rows}
    if len(sums) != 1:
        raise RaggedMatrix(f"rows sum to differing rater counts: {sorted(sums)}")
    n = sums.pop()
    if n < 2:
        raise TooFewAnnotators(f"need >= 2 raters per item, got {n}")

    n_items = len(rows)
    p_observed = sum(
        (sum(c * c for c in row) - n) / (n * (n - 1)) for row in rows
    ) / n_items
    totals = [sum(row[j] for row in rows) for j in range(width)]
    grand = n_items * n
    p_expected = sum((t / grand) ** 2 for t in totals)
    if p_expected == 1.0:
        return 1.0
    return (p_observed - p_expected) / (1 - p_expected)


def adjudicate(
    corpus: Sequence[CodeFile],
) -> tuple[list[CodeFile], AgreementReport]:
    """Fill gold labels by majority vote and report agreement.

    Every line must carry annotator labels; the rater count must be
    constant. Lines without a strict majority keep gold=None and are listed
    in ``conflict_lines`` for manual resolution. Gold is never INVALID.
    """
    category_index = {label: j for j, label in enumerate(GOLD_LABELS)}
    matrix: list[list[int]] = []
    conflicts: list[tuple[str, int, tuple[Label, ...]]] = []
    resolved = 0
    total = 0
    out_files: list[CodeFile] = []

    for file in corpus:
        new_lines = []
        for line in file.lines:
            if line.annotator_labels is None:
                raise MalformedRecord(
                    f"{file.file_id}:{line.line_no}: no annotator labels"
                )
            total += 1
            row = [0] * len(GOLD_LABELS)
            for vote in line.annotator_labels:
                row[category_index[vote]] += 1
            matrix.append(row)
            outcome = majority_vote(line.annotator_labels)
            if isinstance(outcome, Label):
                resolved += 1
                new_lines.append(replace(line, gold=outcome))
            else:
                conflicts.append((file.file_id, line.line_no, line.annotator_labels))
                new_lines.append(line)
        out_files.append(replace(file, lines=tuple(new_lines)))

    report = AgreementReport(
        kappa=fleiss_kappa(matrix),
        resolvable_fraction=resolved / total,
        conflict_lines=tuple(conflicts),
    )
    return out_files, report
