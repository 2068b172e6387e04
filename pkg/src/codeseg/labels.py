"""The closed label taxonomy and normalization of free-text predictions."""

from __future__ import annotations

import re
from enum import Enum

from .errors import UnknownLabel


class Label(Enum):
    """Functional category assigned to one source line.

    Seven annotatable stages plus ``INVALID``, the outcome reserved for
    backend responses that match no stage. ``INVALID`` is never a gold
    label; it only ever appears on the prediction side.
    """

    LOADING_LIBRARY = "Loading Library"
    LOADING_DATA = "Loading Data"
    DATA_WRANGLING = "Data Wrangling"
    ANALYSIS = "Analysis"
    VISUALIZATION = "Visualization"
    SAVING_TO_OUTPUT = "Saving To Output"
    COMMENT = "Comment"
    INVALID = "Invalid"

    @property
    def display(self) -> str:
        """Canonical display string, used verbatim on disk."""
        return self.value


#: The seven annotatable labels in fixed class order (INVALID excluded).
GOLD_LABELS: tuple[Label, ...] = tuple(l for l in Label if l is not Label.INVALID)

#: Column order for prediction tallies: gold labels followed by INVALID.
PRED_LABELS: tuple[Label, ...] = GOLD_LABELS + (Label.INVALID,)


def label_from_display(text: str) -> Label:
    """Exact, case-sensitive lookup of a canonical display string.

    Raises UnknownLabel for anything outside the eight canonical strings.
    """
    try:
        return Label(text)
    except ValueError:
        raise UnknownLabel(f"not a taxonomy label: {text!r}") from None


def gold_label_from_display(text: str) -> Label:
    """Like label_from_display, but rejects 'Invalid' (never a gold label)."""
    label = label_from_display(text)
    if label is Label.INVALID:
        raise UnknownLabel("'Invalid' is not an annotatable label")
    return label


def _label_pattern(display: str) -> re.Pattern[str]:
    # Whole-word match of the label's words, tolerating any punctuation or
    # whitespace (including none) between them: "Loading Data", "loading_data"
    # and "LoadingData" all match.
    words = [re.escape(w) for w in display.split()]
    return re.compile(r"\b" + r"[\W_]*".join(words) + r"\b", re.IGNORECASE)


# Longest display string first so nested names (none today) would resolve to
# the longest match.
_LABEL_PATTERNS: tuple[tuple[Label, re.Pattern[str]], ...] = tuple(
    (label, _label_pattern(label.display))
    for label in sorted(GOLD_LABELS, key=lambda l: -len(l.display))
)


def normalize_label(raw: str) -> Label:
    """Map free-form backend output onto the taxonomy.

    Case-, whitespace-, and punctuation-insensitive search for canonical
    label names in ``raw``. Exactly one distinct label found returns that
    label; zero or two-plus distinct labels return ``INVALID``. Total: never
    raises.
    """
    found = {label for label, pattern in _LABEL_PATTERNS if pattern.search(raw)}
    if len(found) == 1:
        return found.pop()
    return Label.INVALID
