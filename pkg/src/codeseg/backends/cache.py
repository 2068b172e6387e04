"""Disk-backed response cache and the replay backend built on its format."""

from __future__ import annotations

import hashlib
import json
import threading
import time
from pathlib import Path


def response_key(backend_id: str, prompt: str) -> str:
    """Content address of one request: hash of backend id + rendered prompt."""
    payload = f"{backend_id}\x00{prompt}".encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


class ResponseCache:
    """Append-only JSONL map from prompt hashes to raw response text.

    Records are ``{"prompt_hash", "backend_id", "raw_text", "timestamp"}``.
    Responses are written as they arrive so interrupted runs resume without
    re-querying. Access is serialized by a lock. ``path=None`` keeps the
    cache in memory only.
    """

    def __init__(self, path: str | Path | None = None) -> None:
        self._path = Path(path) if path is not None else None
        self._records: dict[str, str] = {}
        self._lock = threading.Lock()
        if self._path is not None and self._path.exists():
            self._records.update(load_response_records(self._path))

    def __len__(self) -> int:
        return len(self._records)

    def get(self, key: str) -> str | None:
        with self._lock:
            return self._records.get(key)

    def put(self, key: str, backend_id: str, raw_text: str) -> None:
        with self._lock:
            if key in self._records:
                return
            self._records[key] = raw_text
            if self._path is not None:
                record = {
                    "prompt_hash": key,
                    "backend_id": backend_id,
                    "raw_text": raw_text,
                    "timestamp": time.time(),
                }
                self._path.parent.mkdir(parents=True, exist_ok=True)
                with self._path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def load_response_records(path: str | Path) -> dict[str, str]:
    """Read cache/replay records into a prompt_hash -> raw_text map."""
    records: dict[str, str] = {}
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            records[record["prompt_hash"]] = record["raw_text"]
    return records


def write_response_records(
    path: str | Path, responses: dict[str, str], backend_id: str
) -> None:
    """Write a replay fixture: one cache-format record per prompt hash."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for key in sorted(responses):
            record = {
                "prompt_hash": key,
                "backend_id": backend_id,
                "raw_text": responses[key],
                "timestamp": 0,
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
