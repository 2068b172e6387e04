from __future__ import annotations

import random
from pathlib import Path
from typing import Callable, Sequence

import pytest

from codeseg.backends.cache import response_key, write_response_records
from codeseg.corpus import CodeFile, LabeledLine, load_corpus
from codeseg.labels import Label
from codeseg.preprocess import tokenize
from codeseg.rangeseg import RangeSpan, render_range_prompt
from codeseg.segment import consolidate
from codeseg.window import WindowConfig, build_window, render_line_prompt

DATA_DIR = Path(__file__).parent / "data"


def make_file(
    codes: Sequence[str],
    golds: Sequence[Label | None] | None = None,
    file_id: str = "fx",
    split: str = "test",
    language: str = "R",
) -> CodeFile:
    if golds is None:
        golds = [None] * len(codes)
    lines = tuple(
        LabeledLine(
            line_no=i,
            code=code,
            token_count=len(tokenize(code)),
            gold=gold,
        )
        for i, (code, gold) in enumerate(zip(codes, golds), start=1)
    )
    return CodeFile(file_id=file_id, language=language, split=split, lines=lines)


def make_line(code: str, line_no: int = 1, gold: Label | None = None) -> LabeledLine:
    return LabeledLine(
        line_no=line_no, code=code, token_count=len(tokenize(code)), gold=gold
    )


# Per-label line templates; distinct vocabularies keep classes separable.
_TEMPLATES: dict[Label, str] = {
    Label.LOADING_LIBRARY: "library(pkg{i})",
    Label.LOADING_DATA: 'dat{i} <- read_csv("input_{i}.csv")',
    Label.DATA_WRANGLING: "dat{i} <- filter(dat{i}, score > {i})",
    Label.ANALYSIS: "fit{i} <- lm(outcome ~ factor{i}, data = dat{i})",
    Label.VISUALIZATION: "ggplot(dat{i}, aes(x{i}, y{i})) + geom_point()",
    Label.SAVING_TO_OUTPUT: 'write.csv(dat{i}, "out_{i}.csv")',
    Label.COMMENT: "# note {i} about preprocessing",
}


def synthetic_corpus(
    labels: Sequence[Label],
    n_per_label: int,
    lines_per_file: int = 10,
    split: str = "train",
    seed: int = 7,
    prefix: str = "syn",
) -> list[CodeFile]:
    """Template-generated corpus with one vocabulary per label."""
    rng = random.Random(seed)
    pool = [
        (label, _TEMPLATES[label].format(i=i))
        for label in labels
        for i in range(n_per_label)
    ]
    rng.shuffle(pool)
    files = []
    for start in range(0, len(pool), lines_per_file):
        chunk = pool[start : start + lines_per_file]
        files.append(
            make_file(
                [code for _, code in chunk],
                [label for label, _ in chunk],
                file_id=f"{prefix}{start // lines_per_file:03d}",
                split=split,
            )
        )
    return files


def build_line_replay(
    files: Sequence[CodeFile],
    c_values: Sequence[int],
    answer: Callable[[CodeFile, LabeledLine], str] | None = None,
    backend_id: str = "replay",
) -> dict[str, str]:
    """Recorded responses for every line prompt of every context size.

    Defaults to answering with the gold display string, i.e. a perfect
    predictor.
    """
    if answer is None:
        answer = lambda file, line: line.gold.display
    records: dict[str, str] = {}
    for c in c_values:
        config = WindowConfig(c=c)
        for file in files:
            for line in file.lines:
                prompt = render_line_prompt(build_window(file, line.line_no, config))
                records[response_key(backend_id, prompt)] = answer(file, line)
    return records


def build_range_replay(
    files: Sequence[CodeFile],
    answer: Callable[[CodeFile], str] | None = None,
    backend_id: str = "replay",
) -> dict[str, str]:
    """Recorded whole-file responses; defaults to gold segments as ranges."""

    def gold_ranges(file: CodeFile) -> str:
        segments = consolidate([line.gold for line in file.lines])
        return "\n".join(
            RangeSpan(s.start, s.end, s.label).format() for s in segments
        )

    if answer is None:
        answer = gold_ranges
    records: dict[str, str] = {}
    for file in files:
        prompt = render_range_prompt(file)
        records[response_key(backend_id, prompt)] = answer(file)
    return records


def write_replay(path: Path, records: dict[str, str], backend_id: str = "replay") -> Path:
    write_response_records(path, records, backend_id)
    return path


@pytest.fixture(scope="session")
def fixture_corpus_path() -> Path:
    return DATA_DIR / "fixture_corpus.jsonl"


@pytest.fixture(scope="session")
def fixture_files(fixture_corpus_path: Path) -> list[CodeFile]:
    return load_corpus(fixture_corpus_path)


@pytest.fixture(scope="session")
def annotated_corpus_path() -> Path:
    return DATA_DIR / "annotated_corpus.jsonl"
