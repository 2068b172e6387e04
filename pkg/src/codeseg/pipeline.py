"""Run either segmentation approach over a corpus with ordered results."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

from .backends.base import Backend, BackendResponse, respond_cached
from .backends.cache import ResponseCache
from .backends.fewshot import Demonstration, pool_embeddings, select_fewshot
from .corpus import CodeFile
from .errors import NoRangesFound
from .labels import Label
from .rangeseg import expand_to_lines, parse_ranges, render_range_prompt, repair_ranges
from .window import ContextWindow, WindowConfig, build_window, center_truncate, render_line_prompt


def prepare_window(
    file: CodeFile, index: int, config: WindowConfig, backend: Backend
) -> ContextWindow:
    """Build the window, applying token-budget centering only when the
    backend declares a token limit."""
    window = build_window(file, index, config)
    if backend.token_limit is None:
        return window
    budget_config = WindowConfig(
        c=config.c,
        max_tokens=backend.token_limit,
        reserved_tokens=config.reserved_tokens,
    )
    return center_truncate(window, budget_config)


def run_line_by_line(
    files: Sequence[CodeFile],
    backend: Backend,
    config: WindowConfig,
    *,
    mode: str = "zero_shot",
    demonstration_pool: Sequence[Demonstration] | None = None,
    shots: int = 16,
    cache: ResponseCache | None = None,
    lenient: bool = True,
    invalid_retries: int = 1,
    max_in_flight: int = 4,
) -> dict[str, list[BackendResponse]]:
    """Classify every line of every file, results in line order.

    Remote-style backends run with bounded concurrency; responses are
    reassembled in line order before being returned, so downstream
    consolidation sees a deterministic sequence.
    """
    results: dict[str, list[BackendResponse]] = {}
    pool = list(demonstration_pool or [])
    embeddings = pool_embeddings(pool) if mode == "carp_few_shot" and pool else None
    for file in files:
        tasks: list[tuple[ContextWindow, list[Demonstration] | None]] = []
        for line in file.lines:
            window = prepare_window(file, line.line_no, config, backend)
            demos = None
            if mode == "carp_few_shot":
                demos = select_fewshot(pool, window, shots, embeddings=embeddings)
            tasks.append((window, demos))

        def ask(task: tuple[ContextWindow, list[Demonstration] | None]) -> BackendResponse:
            window, demos = task
            prompt = render_line_prompt(window, mode, demos)
            return respond_cached(
                backend,
                prompt,
                window,
                cache=cache,
                lenient=lenient,
                invalid_retries=invalid_retries,
            )

        if backend.concurrency_safe and max_in_flight > 1:
            with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
                responses = list(pool.map(ask, tasks))
        else:
            responses = [ask(task) for task in tasks]
        results[file.file_id] = responses
    return results


def run_range_based(
    files: Sequence[CodeFile],
    backend: Backend,
    *,
    repair_policy: str = "first_wins_fill_invalid",
    important_details: str | None = None,
    cache: ResponseCache | None = None,
    lenient: bool = True,
    max_in_flight: int = 4,
) -> dict[str, list[Label]]:
    """One whole-file request per file, expanded to per-line labels.

    A response without any parseable ranges marks the whole file INVALID in
    lenient mode (scored as misclassifications) and raises otherwise.
    """

    def ask(file: CodeFile) -> list[Label]:
        if important_details is None:
            prompt = render_range_prompt(file)
        else:
            prompt = render_range_prompt(file, important_details)
        response = respond_cached(backend, prompt, None, cache=cache, lenient=lenient)
        try:
            parsed = parse_ranges(response.raw_text)
        except NoRangesFound:
            if not lenient:
                raise
            return [Label.INVALID] * len(file)
        repaired = repair_ranges(parsed.spans, len(file), repair_policy)
        return expand_to_lines(repaired)

    if backend.concurrency_safe and max_in_flight > 1:
        with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
            all_labels = list(pool.map(ask, files))
    else:
        all_labels = [ask(file) for file in files]
    return {file.file_id: labels for file, labels in zip(files, all_labels)}


def labels_of(responses: Sequence[BackendResponse]) -> list[Label]:
    return [response.label for response in responses]
