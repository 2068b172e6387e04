"""Per-line context windows and prompt rendering for the line approach."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Sequence

from .corpus import CodeFile, LabeledLine
from .errors import IndexOutOfRange, MissingDemonstrations, TargetExceedsBudget
from .preprocess import token_spans
from .prompts import LABEL_DEFINITIONS, LINE_PROMPT_TEMPLATE, LINE_RULES, tag_block

if TYPE_CHECKING:
    from .backends.fewshot import Demonstration

PROMPT_MODES = ("zero_shot", "carp_few_shot")


@dataclass(frozen=True)
class WindowConfig:
    """Symmetric context size and token budget.

    ``c`` lines are taken on each side of the target. The usable budget is
    ``max_tokens - reserved_tokens`` (the reservation covers special tokens
    added by sequence models).
    """

    c: int = 3
    max_tokens: int = 512
    reserved_tokens: int = 2

    def __post_init__(self) -> None:
        if self.c < 0:
            raise ValueError(f"context size must be >= 0, got {self.c}")
        if self.max_tokens <= self.reserved_tokens:
            raise ValueError("max_tokens must exceed reserved_tokens")

    @property
    def budget(self) -> int:
        return self.max_tokens - self.reserved_tokens


@dataclass(frozen=True)
class ContextWindow:
    """A target line with up to ``c`` preceding and following lines."""

    previous: tuple[LabeledLine, ...]
    target: LabeledLine
    next: tuple[LabeledLine, ...]
    truncated: bool = False
    file_id: str = ""

    @property
    def total_tokens(self) -> int:
        return (
            sum(l.token_count for l in self.previous)
            + self.target.token_count
            + sum(l.token_count for l in self.next)
        )


def build_window(file: CodeFile, index: int, config: WindowConfig) -> ContextWindow:
    """Window around 1-based line ``index``, clipped at the file boundaries."""
    if not 1 <= index <= len(file):
        raise IndexOutOfRange(
            f"{file.file_id}: line {index} outside 1..{len(file)}"
        )
    c = config.c
    i = index - 1
    return ContextWindow(
        previous=file.lines[max(0, i - c) : i],
        target=file.lines[i],
        next=file.lines[i + 1 : i + 1 + c],
        file_id=file.file_id,
    )


def _keep_within(lines: tuple[LabeledLine, ...], cap: int, *, from_front: bool
                 ) -> tuple[LabeledLine, ...]:
    # Drop whole lines farthest from the target until the side fits its cap.
    kept = list(lines)
    total = sum(l.token_count for l in kept)
    while kept and total > cap:
        dropped = kept.pop(0) if from_front else kept.pop()
        total -= dropped.token_count
    return tuple(kept)


def _tail_truncate(line: LabeledLine, budget: int) -> LabeledLine:
    spans = token_spans(line.code)
    cut = spans[budget - 1][1] if budget > 0 else 0
    return replace(line, code=line.code[:cut], token_count=min(budget, len(spans)))


def center_truncate(window: ContextWindow, config: WindowConfig) -> ContextWindow:
    """Shrink a window so its token total fits the budget, target centered.

    Windows already within budget are returned unchanged. Otherwise each
    side keeps its nearest lines up to ``(budget - target) // 2`` tokens,
    dropping whole lines outside-in, which keeps the retained preceding and
    following token masses within one line of each other whenever both
    sides are token-rich. A target that alone exceeds the budget is
    tail-truncated to the budget with both contexts dropped; this is a
    documented convention and emits a TargetExceedsBudget warning.
    """
    budget = config.budget
    if window.target.token_count > budget:
        warnings.warn(
            f"target line of {window.target.token_count} tokens exceeds "
            f"budget {budget}; tail-truncated",
            TargetExceedsBudget,
            stacklevel=2,
        )
        return replace(
            window,
            previous=(),
            target=_tail_truncate(window.target, budget),
            next=(),
            truncated=True,
        )
    if window.total_tokens <= budget:
        return window
    side_cap = (budget - window.target.token_count) // 2
    previous = _keep_within(window.previous, side_cap, from_front=True)
    nxt = _keep_within(window.next, side_cap, from_front=False)
    return replace(window, previous=previous, next=nxt, truncated=True)


def _demonstration_block(demo: "Demonstration", number: int) -> str:
    return (
        f"## Example {number}:\n"
        f"<previous_context>{tag_block([l.code for l in demo.window.previous])}</previous_context>\n"
        f"\n"
        f"<target_line>{tag_block([demo.window.target.code])}</target_line>\n"
        f"\n"
        f"<next_context>{tag_block([l.code for l in demo.window.next])}</next_context>\n"
        f"\n"
        f"Clue: {demo.clue}\n"
        f"Reasoning: {demo.reasoning}\n"
        f"Category: {demo.gold.display}\n"
    )


def render_line_prompt(
    window: ContextWindow,
    mode: str = "zero_shot",
    demonstrations: Sequence["Demonstration"] | None = None,
) -> str:
    """Render the classification prompt for one window.

    Zero-shot emits the objective, label definitions, rules, output note,
    and the three-tag context block. CARP few-shot additionally inserts one
    block per demonstration, each carrying its clue and reasoning ahead of
    the gold category. Byte-deterministic for fixed inputs.
    """
    if mode not in PROMPT_MODES:
        raise ValueError(f"unknown prompt mode {mode!r}")
    demos = ""
    if mode == "carp_few_shot":
        if not demonstrations:
            raise MissingDemonstrations("carp_few_shot requires demonstrations")
        blocks = [
            _demonstration_block(demo, i)
            for i, demo in enumerate(demonstrations, start=1)
        ]
        demos = "# Examples:\n" + "\n".join(blocks) + "\n"
    return LINE_PROMPT_TEMPLATE.format(
        labels=LABEL_DEFINITIONS,
        rules=LINE_RULES,
        demonstrations=demos,
        previous=tag_block([l.code for l in window.previous]),
        target=tag_block([window.target.code]),
        next=tag_block([l.code for l in window.next]),
    )
