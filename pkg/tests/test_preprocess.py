from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from codeseg.errors import EmptyInput, LeadingBracketLine, LengthMismatch
from codeseg.preprocess import (
    PYTHON_PROFILE,
    R_PROFILE,
    migrate_brackets,
    profile_for,
    token_spans,
    tokenize,
)


def test_migrates_bracket_only_lines_into_preceding_line() -> None:
    lines = ["f <- function(a)", "{", "  a + 1", "}"]
    migrated, mapping = migrate_brackets(lines, R_PROFILE)
    assert migrated == ["f <- function(a) {", "  a + 1 }"]
    assert mapping.images == ((1, 2), (3, 4))


def test_no_bracket_lines_is_identity() -> None:
    lines = ["x <- 1", "y <- 2"]
    migrated, mapping = migrate_brackets(lines, R_PROFILE)
    assert migrated == lines
    assert mapping.images == ((1,), (2,))


def test_python_profile_disables_migration() -> None:
    lines = ["def f(a):", "    return [", "        a,", "    ]"]
    migrated, mapping = migrate_brackets(lines, PYTHON_PROFILE)
    assert migrated == lines
    assert mapping.images == tuple((i,) for i in range(1, 5))


def test_trailing_comma_and_semicolon_still_migrate() -> None:
    migrated, _ = migrate_brackets(["x <- c(1, 2", "),", "y <- 3"], R_PROFILE)
    assert migrated == ["x <- c(1, 2 ),", "y <- 3"]


def test_whitespace_separated_brackets_migrate() -> None:
    migrated, _ = migrate_brackets(["m <- matrix(", "} )"], R_PROFILE)
    assert migrated == ["m <- matrix( } )"]


def test_leading_bracket_line_is_kept_with_warning() -> None:
    with pytest.warns(LeadingBracketLine):
        migrated, mapping = migrate_brackets(["}", "x <- 1"], R_PROFILE)
    assert migrated == ["}", "x <- 1"]
    assert mapping.images == ((1,), (2,))


def test_empty_input_raises() -> None:
    with pytest.raises(EmptyInput):
        migrate_brackets([], R_PROFILE)


def test_migration_is_idempotent_on_examples() -> None:
    lines = ["setup <- list(", "  a = 1,", ")", "{", "}", "done <- TRUE"]
    once, _ = migrate_brackets(lines, R_PROFILE)
    twice, _ = migrate_brackets(once, R_PROFILE)
    assert once == twice


_CODE_LINES = st.sampled_from(
    ["x <- 1", "f(a, b)", "  y = x + 2", "# comment", "z <- c(1,", "print(z)"]
)
_BRACKET_LINES = st.sampled_from(["{", "}", ")", "(", "]", "[", "},", ");", "} )"])


@given(st.lists(st.one_of(_CODE_LINES, _BRACKET_LINES), min_size=1, max_size=30))
def test_migration_idempotent_and_mapping_total(lines: list[str]) -> None:
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LeadingBracketLine)
        once, mapping = migrate_brackets(lines, R_PROFILE)
        twice, _ = migrate_brackets(once, R_PROFILE)
    assert once == twice
    assert len(once) <= len(lines)
    # every source line lands in exactly one contiguous image
    flat = [n for image in mapping.images for n in image]
    assert flat == list(range(1, len(lines) + 1))


def test_expand_labels_projects_once_per_source_line() -> None:
    lines = ["f <- function(a)", "{", "  a + 1", "}", "f(2)"]
    _, mapping = migrate_brackets(lines, R_PROFILE)
    expanded = mapping.expand_labels(["A", "B", "C"])
    assert expanded == ["A", "A", "B", "B", "C"]
    with pytest.raises(LengthMismatch):
        mapping.expand_labels(["A"])


def test_tokenize_examples() -> None:
    assert tokenize("library(mgcv)") == ["library", "(", "mgcv", ")"]
    assert tokenize("x <- 1") == ["x", "<-", "1"]
    assert tokenize("") == []


def test_tokenize_keeps_identifier_runs_whole() -> None:
    assert tokenize("data.frame(df$col_1)") == ["data.frame", "(", "df", "$", "col_1", ")"]


@given(st.text(max_size=120))
def test_tokens_reconstruct_non_whitespace(line: str) -> None:
    assert "".join(tokenize(line)) == "".join(line.split())


@given(st.text(max_size=120))
def test_tokenize_is_deterministic(line: str) -> None:
    assert tokenize(line) == tokenize(line)


@given(st.text(max_size=120))
def test_token_spans_align_with_tokens(line: str) -> None:
    spans = token_spans(line)
    tokens = tokenize(line)
    assert [line[a:b] for a, b in spans] == tokens


def test_profile_lookup() -> None:
    assert profile_for("R").bracket_migration_enabled
    assert not profile_for("Python").bracket_migration_enabled
    with pytest.raises(ValueError):
        profile_for("Fortran")
