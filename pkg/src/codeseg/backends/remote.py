"""Generic chat-completion HTTP backend with retries and rate limiting."""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass

import httpx

from ..errors import BackendTimeout, BackendUnavailable
from ..window import ContextWindow
from .base import Backend

_RETRYABLE_STATUS = frozenset({429, 500, 502, 503, 504})


@dataclass(frozen=True)
class RemoteConfig:
    """Connection settings for a chat-completion endpoint.

    ``auth_env`` names the environment variable holding the bearer token;
    the token itself is never stored or reported.
    """

    endpoint: str
    model: str
    auth_env: str = "CODESEG_API_KEY"
    max_retries: int = 3
    timeout_seconds: float = 30.0
    temperature: float = 0.0
    min_request_interval: float = 0.0


class RemoteBackend(Backend):
    """POSTs prompts as single-message chat completions.

    No vendor-specific behavior: any endpoint accepting
    ``{"model", "messages", "temperature"}`` and answering with
    ``choices[0].message.content`` works. Transient failures (429/5xx,
    transport errors) are retried with exponential backoff up to
    ``max_retries``; requests are spaced at least
    ``min_request_interval`` seconds apart across threads.
    """

    token_limit = None
    retry_on_invalid = True
    concurrency_safe = True

    def __init__(
        self, config: RemoteConfig, transport: httpx.BaseTransport | None = None
    ) -> None:
        self.config = config
        self._client = httpx.Client(
            transport=transport, timeout=config.timeout_seconds
        )
        self._rate_lock = threading.Lock()
        self._next_start = 0.0

    @property
    def backend_id(self) -> str:
        return f"remote:{self.config.model}"

    def _throttle(self) -> None:
        if self.config.min_request_interval <= 0:
            return
        with self._rate_lock:
            now = time.monotonic()
            wait = self._next_start - now
            self._next_start = max(now, self._next_start) + self.config.min_request_interval
        if wait > 0:
            time.sleep(wait)

    def respond(self, prompt: str, window: ContextWindow | None = None) -> str:
        payload = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
        }
        headers = {}
        token = os.environ.get(self.config.auth_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"

        last_error: Exception | None = None
        for attempt in range(self.config.max_retries + 1):
            if attempt:
                time.sleep(min(0.5 * 2 ** (attempt - 1), 8.0))
            self._throttle()
            try:
                response = self._client.post(
                    self.config.endpoint, json=payload, headers=headers
                )
            except httpx.TimeoutException as exc:
                last_error = BackendTimeout(str(exc))
                continue
            except httpx.HTTPError as exc:
                last_error = BackendUnavailable(str(exc))
                continue
            if response.status_code in _RETRYABLE_STATUS:
                last_error = BackendUnavailable(
                    f"HTTP {response.status_code} from {self.config.endpoint}"
                )
                continue
            if response.status_code != 200:
                raise BackendUnavailable(
                    f"HTTP {response.status_code} from {self.config.endpoint}"
                )
            try:
                return response.json()["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError, ValueError) as exc:
                raise BackendUnavailable(
                    f"malformed completion payload: {exc}"
                ) from None
        assert last_error is not None
        raise last_error
