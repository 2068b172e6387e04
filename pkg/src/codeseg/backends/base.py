"""Backend contract and the normalized classification driver."""

from __future__ import annotations

import abc
import time
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from ..errors import BackendTimeout, BackendUnavailable
from ..labels import Label, normalize_label
from ..window import ContextWindow, render_line_prompt
from .cache import ResponseCache, response_key

if TYPE_CHECKING:
    from .fewshot import Demonstration


@dataclass(frozen=True)
class BackendResponse:
    """A backend answer with its normalized label.

    ``label`` is always ``normalize_label(raw_text)``; ``cached`` marks
    answers served from the response cache.
    """

    raw_text: str
    label: Label
    latency: float
    cached: bool


class Backend(abc.ABC):
    """A line classifier or whole-file generator.

    ``token_limit`` is the input budget the backend can accept; None means
    effectively unlimited, and the pipeline skips token-budget centering
    for such backends. ``retry_on_invalid`` marks backends worth re-asking
    when a response normalizes to INVALID (only meaningful for remote,
    non-deterministic transports).
    """

    token_limit: int | None = None
    retry_on_invalid: bool = False
    concurrency_safe: bool = False

    @property
    @abc.abstractmethod
    def backend_id(self) -> str: ...

    @abc.abstractmethod
    def respond(self, prompt: str, window: ContextWindow | None = None) -> str:
        """Raw response text for a rendered prompt.

        Line classification passes the window alongside the prompt so
        non-generative backends can answer from it; whole-file generation
        passes window=None.
        """


def respond_cached(
    backend: Backend,
    prompt: str,
    window: ContextWindow | None = None,
    *,
    cache: ResponseCache | None = None,
    lenient: bool = False,
    invalid_retries: int = 1,
) -> BackendResponse:
    """Answer a prompt through the cache, normalizing the response.

    The cache is consulted first (key = hash of backend id + prompt).
    Transport failures surface as INVALID-labeled responses in lenient
    mode and are never cached, so resumed runs re-ask; in strict mode they
    propagate. An INVALID answer from a retryable backend is re-asked up to
    ``invalid_retries`` times before being accepted and scored as wrong.
    """
    start = time.perf_counter()
    key = response_key(backend.backend_id, prompt)
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return BackendResponse(
                raw_text=hit,
                label=normalize_label(hit),
                latency=time.perf_counter() - start,
                cached=True,
            )
    attempts = 1 + (invalid_retries if backend.retry_on_invalid else 0)
    try:
        for attempt in range(attempts):
            raw = backend.respond(prompt, window)
            label = normalize_label(raw)
            if label is not Label.INVALID or attempt == attempts - 1:
                break
    except (BackendUnavailable, BackendTimeout):
        if not lenient:
            raise
        return BackendResponse(
            raw_text="",
            label=Label.INVALID,
            latency=time.perf_counter() - start,
            cached=False,
        )
    if cache is not None:
        cache.put(key, backend.backend_id, raw)
    return BackendResponse(
        raw_text=raw,
        label=label,
        latency=time.perf_counter() - start,
        cached=False,
    )


def classify_line(
    backend: Backend,
    window: ContextWindow,
    mode: str = "zero_shot",
    demonstrations: Sequence["Demonstration"] | None = None,
    *,
    cache: ResponseCache | None = None,
    lenient: bool = False,
    invalid_retries: int = 1,
) -> BackendResponse:
    """Classify one window: render its prompt, answer it, normalize."""
    prompt = render_line_prompt(window, mode, demonstrations)
    return respond_cached(
        backend,
        prompt,
        window,
        cache=cache,
        lenient=lenient,
        invalid_retries=invalid_retries,
    )
