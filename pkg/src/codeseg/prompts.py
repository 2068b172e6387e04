"""Prompt template assets shared by the line and range approaches.

Templates live under ``codeseg/templates`` as plain text with named
placeholders; rendering is byte-deterministic for fixed inputs, and the
golden-fixture tests pin the exact output.
"""

from __future__ import annotations

import hashlib
from importlib import resources


def _asset(name: str) -> str:
    return (
        resources.files("codeseg.templates").joinpath(name).read_text(encoding="utf-8")
    )


LABEL_DEFINITIONS = _asset("label_definitions.txt").rstrip("\n")
LINE_RULES = _asset("line_rules.txt").rstrip("\n")
LINE_PROMPT_TEMPLATE = _asset("line_prompt.txt")
RANGE_PROMPT_TEMPLATE = _asset("range_prompt.txt")
DEFAULT_RANGE_DETAILS = _asset("range_details.txt").rstrip("\n")


def template_hash() -> str:
    """Digest over every template asset, recorded in reports for provenance."""
    payload = "\x00".join(
        (
            LABEL_DEFINITIONS,
            LINE_RULES,
            LINE_PROMPT_TEMPLATE,
            RANGE_PROMPT_TEMPLATE,
            DEFAULT_RANGE_DETAILS,
        )
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def tag_block(lines: list[str]) -> str:
    """Content placed between a pair of context tags.

    Empty context renders as an empty string so the tag pair collapses to
    ``<tag></tag>`` rather than being omitted.
    """
    if not lines:
        return ""
    return "\n" + "\n".join(lines) + "\n"
