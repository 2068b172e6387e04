"""Source normalization: bracket-line migration and deterministic tokenization."""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from typing import Sequence

from .errors import EmptyInput, LengthMismatch, LeadingBracketLine

#: Characters whose standalone lines get folded into the preceding line.
DEFAULT_BRACKET_CHARS = frozenset("{}[]()")


@dataclass(frozen=True)
class LanguageProfile:
    """Per-language normalization switches."""

    language: str
    bracket_migration_enabled: bool = True
    bracket_characters: frozenset[str] = field(default=DEFAULT_BRACKET_CHARS)


R_PROFILE = LanguageProfile("R", bracket_migration_enabled=True)
# Python is indentation-structured; folding bracket lines would change meaning.
PYTHON_PROFILE = LanguageProfile("Python", bracket_migration_enabled=False)

_PROFILES = {"R": R_PROFILE, "Python": PYTHON_PROFILE}


def profile_for(language: str) -> LanguageProfile:
    try:
        return _PROFILES[language]
    except KeyError:
        raise ValueError(f"no language profile for {language!r}") from None


@dataclass(frozen=True)
class LineMapping:
    """Which original lines each post-migration line absorbed.

    ``images[i]`` holds the 1-based source line numbers merged into
    post-migration line ``i + 1``. Every source line appears exactly once
    and each image is a contiguous interval.
    """

    images: tuple[tuple[int, ...], ...]

    @property
    def source_length(self) -> int:
        return sum(len(img) for img in self.images)

    def expand_labels(self, labels: Sequence) -> list:
        """Project one label per post-migration line back onto every source line."""
        if len(labels) != len(self.images):
            raise LengthMismatch(
                f"{len(labels)} labels for {len(self.images)} migrated lines"
            )
        out = [None] * self.source_length
        for image, label in zip(self.images, labels):
            for source_no in image:
                out[source_no - 1] = label
        return out


def _bracket_only(line: str, bracket_chars: frozenset[str]) -> bool:
    content = "".join(line.split())
    if content and content[-1] in ",;":
        content = content[:-1]
    return bool(content) and all(ch in bracket_chars for ch in content)


def migrate_brackets(
    lines: Sequence[str], profile: LanguageProfile
) -> tuple[list[str], LineMapping]:
    """Fold bracket-only lines into the nearest preceding retained line.

    A line qualifies when its non-whitespace content consists solely of
    bracket characters, optionally ending in one comma or semicolon. Both
    opening and closing bracket lines are folded. A qualifying first line
    has nothing to fold into; it is kept as-is with a LeadingBracketLine
    warning. With migration disabled the input is returned unchanged under
    an identity mapping. Idempotent.
    """
    if not lines:
        raise EmptyInput("no lines to migrate")
    if not profile.bracket_migration_enabled:
        return list(lines), LineMapping(tuple((i,) for i in range(1, len(lines) + 1)))

    out: list[str] = []
    images: list[list[int]] = []
    for source_no, line in enumerate(lines, start=1):
        if _bracket_only(line, profile.bracket_characters) and out:
            out[-1] = out[-1] + " " + line.strip()
            images[-1].append(source_no)
        else:
            if not out and _bracket_only(line, profile.bracket_characters):
                warnings.warn(
                    f"bracket-only first line kept as-is: {line.strip()!r}",
                    LeadingBracketLine,
                    stacklevel=2,
                )
            out.append(line)
            images.append([source_no])
    return out, LineMapping(tuple(tuple(img) for img in images))


# Maximal runs of identifier characters vs. maximal runs of any other
# printable characters; whitespace only separates tokens.
_TOKEN_RE = re.compile(r"[A-Za-z0-9._]+|[^\sA-Za-z0-9._]+")


def tokenize(line: str) -> list[str]:
    """Deterministic two-class token split.

    Splits a line into maximal runs of identifier characters
    (``[A-Za-z0-9._]``) and maximal runs of other non-space characters.
    Concatenating the tokens reproduces the line's non-whitespace content.
    This is a stand-in for subword tokenizers, so absolute token counts are
    approximations; swap in another callable wherever a tokenizer is
    configurable if subword-faithful counts are needed.
    """
    return _TOKEN_RE.findall(line)


def token_spans(line: str) -> list[tuple[int, int]]:
    """Character offsets of each token, for position-preserving truncation."""
    return [(m.start(), m.end()) for m in _TOKEN_RE.finditer(line)]
