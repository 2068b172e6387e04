"""codeseg: segment statistical research code into labeled functional segments.

Two approaches are provided: per-line classification inside a symmetric
context window (consolidated into segments afterwards) and whole-file
range generation (parsed, validated, repaired, and expanded back to
lines). Classifier backends are pluggable: a keyword heuristic, a
trainable hashed-feature linear model, a generic chat-completion client,
and a deterministic replay backend for reproducible evaluation.
"""

from .corpus import (
    CONFLICT,
    AgreementReport,
    CodeFile,
    CorpusStats,
    LabeledLine,
    adjudicate,
    corpus_stats,
    fleiss_kappa,
    load_corpus,
    majority_vote,
    write_corpus,
)
from .labels import GOLD_LABELS, PRED_LABELS, Label, normalize_label
from .metrics import ConfusionMatrix, MetricsReport, confusion, evaluate_run, metrics
from .preprocess import LanguageProfile, LineMapping, migrate_brackets, tokenize
from .rangeseg import (
    RangeSpan,
    RangeValidation,
    encode_lines,
    expand_to_lines,
    parse_ranges,
    render_range_prompt,
    repair_ranges,
    validate_ranges,
)
from .segment import Segment, SegmentCountStats, consolidate, segment_count_stats
from .window import (
    ContextWindow,
    WindowConfig,
    build_window,
    center_truncate,
    render_line_prompt,
)

__version__ = "0.1.0"

__all__ = [
    "AgreementReport",
    "CONFLICT",
    "CodeFile",
    "ConfusionMatrix",
    "ContextWindow",
    "CorpusStats",
    "GOLD_LABELS",
    "Label",
    "LabeledLine",
    "LanguageProfile",
    "LineMapping",
    "MetricsReport",
    "PRED_LABELS",
    "RangeSpan",
    "RangeValidation",
    "Segment",
    "SegmentCountStats",
    "WindowConfig",
    "adjudicate",
    "build_window",
    "center_truncate",
    "confusion",
    "consolidate",
    "corpus_stats",
    "encode_lines",
    "evaluate_run",
    "expand_to_lines",
    "fleiss_kappa",
    "load_corpus",
    "majority_vote",
    "metrics",
    "migrate_brackets",
    "normalize_label",
    "parse_ranges",
    "render_line_prompt",
    "render_range_prompt",
    "repair_ranges",
    "segment_count_stats",
    "tokenize",
    "validate_ranges",
    "write_corpus",
]
