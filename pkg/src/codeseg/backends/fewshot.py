"""Demonstration pool and similarity-ranked few-shot selection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..corpus import CodeFile
from ..errors import EmptyPool
from ..labels import Label
from ..preprocess import tokenize
from ..window import ContextWindow, WindowConfig, build_window
from .local import DEFAULT_FEATURE_DIM, dot_sparse, featurize


@dataclass(frozen=True)
class Demonstration:
    """A labeled example window with its clue and reasoning text."""

    window: ContextWindow
    gold: Label
    clue: str
    reasoning: str

    def __post_init__(self) -> None:
        if self.gold is Label.INVALID:
            raise ValueError("demonstrations must carry an annotatable gold label")


def pool_embeddings(
    pool: Sequence[Demonstration], feature_dim: int = DEFAULT_FEATURE_DIM
) -> list[dict[int, float]]:
    """Hashed-feature vectors for a demonstration pool, computed once."""
    return [featurize(demo.window, feature_dim) for demo in pool]


def select_fewshot(
    pool: Sequence[Demonstration],
    query: ContextWindow,
    k: int,
    feature_dim: int = DEFAULT_FEATURE_DIM,
    embeddings: Sequence[dict[int, float]] | None = None,
) -> list[Demonstration]:
    """Top-k demonstrations by cosine similarity to the query window.

    Embeddings come from the hashed-feature space (already L2-normalized,
    so the dot product is the cosine); pass precomputed ``embeddings``
    when selecting for many queries against one pool. Ties break toward
    the lower pool index; asking for more than the pool holds returns the
    whole pool. The query itself is excluded from its own pool by file id
    and line number.
    """
    if not pool:
        raise EmptyPool("no demonstrations to select from")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if embeddings is None:
        embeddings = pool_embeddings(pool, feature_dim)
    elif len(embeddings) != len(pool):
        raise ValueError("embeddings and pool lengths differ")
    query_vec = featurize(query, feature_dim)
    ranked: list[tuple[float, int]] = []
    for index, demo in enumerate(pool):
        if (
            demo.window.file_id == query.file_id
            and demo.window.target.line_no == query.target.line_no
        ):
            continue
        similarity = dot_sparse(embeddings[index], query_vec)
        ranked.append((-similarity, index))
    ranked.sort()
    return [pool[index] for _, index in ranked[:k]]


def _salient_tokens(code: str, limit: int = 4) -> list[str]:
    seen: list[str] = []
    for tok in tokenize(code):
        if tok[0].isalpha() and tok not in seen:
            seen.append(tok)
        if len(seen) == limit:
            break
    return seen


def demonstrations_from_files(
    files: Sequence[CodeFile], c: int = 3
) -> list[Demonstration]:
    """Build a demonstration pool from every gold-labeled line.

    Clue and reasoning strings are generated deterministically from the
    target line's salient tokens. Draw the pool from the train split only,
    never from evaluation data.
    """
    config = WindowConfig(c=c)
    pool: list[Demonstration] = []
    for file in files:
        for line in file.lines:
            if line.gold is None:
                continue
            window = build_window(file, line.line_no, config)
            tokens = _salient_tokens(line.code)
            if tokens:
                clue = "The target line contains " + ", ".join(tokens) + "."
            else:
                clue = "The target line carries no identifier tokens."
            reasoning = (
                "Together with the surrounding lines, these signals indicate "
                f"work in the {line.gold.display} stage."
            )
            pool.append(
                Demonstration(window=window, gold=line.gold, clue=clue,
                              reasoning=reasoning)
            )
    return pool
