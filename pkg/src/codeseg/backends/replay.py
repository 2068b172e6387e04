"""Deterministic backend answering from recorded responses."""

from __future__ import annotations

from pathlib import Path

from ..errors import BackendUnavailable
from ..window import ContextWindow
from .base import Backend
from .cache import load_response_records, response_key


class ReplayBackend(Backend):
    """Answers every prompt from a read-only fixture of recorded responses.

    The fixture uses the response-cache record format; lookups are by the
    same prompt-hash key the cache uses, so a recorded run replays
    bit-identically without touching any model.
    """

    token_limit = None
    concurrency_safe = True

    def __init__(self, fixture_path: str | Path, backend_id: str = "replay") -> None:
        self._backend_id = backend_id
        self._records = load_response_records(fixture_path)

    @property
    def backend_id(self) -> str:
        return self._backend_id

    def respond(self, prompt: str, window: ContextWindow | None = None) -> str:
        key = response_key(self._backend_id, prompt)
        try:
            return self._records[key]
        except KeyError:
            raise BackendUnavailable(
                f"no recorded response for prompt hash {key[:12]}"
            ) from None
