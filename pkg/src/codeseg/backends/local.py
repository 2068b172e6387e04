"""Trainable hashed-feature linear classifier over context windows.

A multinomial logistic regression on hashed token n-grams. It exercises
the same pipeline interface as the fine-tuned sequence models it stands in
for, at desk scale; it is not expected to match their accuracy.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..corpus import CodeFile
from ..errors import (
    BackendUnavailable,
    DimensionMismatch,
    EmptyTrainingSet,
    UnlabeledLine,
)
from ..labels import GOLD_LABELS, Label
from ..preprocess import tokenize
from ..window import ContextWindow, WindowConfig, build_window, center_truncate
from .base import Backend

MIN_FEATURE_DIM = 1 << 10
DEFAULT_FEATURE_DIM = 1 << 12

#: Target-line n-grams count double; context lines decay with distance.
TARGET_WEIGHT = 2.0


def _hash_index(key: str, feature_dim: int) -> int:
    digest = hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") % feature_dim


def featurize(
    window: ContextWindow, feature_dim: int = DEFAULT_FEATURE_DIM
) -> dict[int, float]:
    """L2-normalized hashed bag of token unigrams and bigrams.

    Target-line features carry weight 2.0; a context line at distance d
    carries 1/(1+d). Keys are the n-gram texts alone, so two windows that
    differ only in one context line differ only in coordinates hashed from
    that line's tokens. Deterministic across runs and platforms.
    """
    if feature_dim < MIN_FEATURE_DIM:
        raise ValueError(f"feature_dim must be >= {MIN_FEATURE_DIM}")
    acc: dict[int, float] = {}

    def add_line(code: str, weight: float) -> None:
        tokens = tokenize(code)
        for tok in tokens:
            idx = _hash_index(f"u\x00{tok}", feature_dim)
            acc[idx] = acc.get(idx, 0.0) + weight
        for a, b in zip(tokens, tokens[1:]):
            idx = _hash_index(f"b\x00{a}\x00{b}", feature_dim)
            acc[idx] = acc.get(idx, 0.0) + weight

    add_line(window.target.code, TARGET_WEIGHT)
    for distance, line in enumerate(reversed(window.previous), start=1):
        add_line(line.code, 1.0 / (1.0 + distance))
    for distance, line in enumerate(window.next, start=1):
        add_line(line.code, 1.0 / (1.0 + distance))

    norm = np.sqrt(sum(v * v for v in acc.values()))
    if norm > 0:
        acc = {i: v / norm for i, v in acc.items()}
    return acc


def dot_sparse(a: dict[int, float], b: dict[int, float]) -> float:
    if len(b) < len(a):
        a, b = b, a
    return sum(v * b.get(i, 0.0) for i, v in a.items())


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 50
    learning_rate: float = 0.5
    feature_dim: int = DEFAULT_FEATURE_DIM
    seed: int = 0
    context_c: int = 3
    batch_size: int = 32
    max_tokens: int = 512
    reserved_tokens: int = 2

    def hash(self) -> str:
        payload = json.dumps(self.__dict__, sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass
class LocalModel:
    """Weights and metadata of a trained linear line classifier."""

    weights: np.ndarray  # (n_classes, feature_dim)
    bias: np.ndarray  # (n_classes,)
    feature_dim: int
    seed: int
    classes: tuple[Label, ...] = GOLD_LABELS
    config_hash: str = ""
    loss_history: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.weights.shape != (len(self.classes), self.feature_dim):
            raise DimensionMismatch(
                f"weights {self.weights.shape} do not match "
                f"{len(self.classes)} classes x {self.feature_dim} features"
            )
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite")


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def _densify(
    features: Sequence[dict[int, float]], feature_dim: int
) -> np.ndarray:
    dense = np.zeros((len(features), feature_dim))
    for row, vec in enumerate(features):
        for idx, value in vec.items():
            dense[row, idx] = value
    return dense


def loss_and_gradients(
    weights: np.ndarray,
    bias: np.ndarray,
    features: np.ndarray,
    class_indices: np.ndarray,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean softmax cross-entropy and its gradients over a dense batch."""
    logits = features @ weights.T + bias
    probs = _softmax(logits)
    m = features.shape[0]
    loss = -float(np.log(probs[np.arange(m), class_indices] + 1e-300).mean())
    delta = probs.copy()
    delta[np.arange(m), class_indices] -= 1.0
    grad_w = delta.T @ features / m
    grad_b = delta.mean(axis=0)
    return loss, grad_w, grad_b


def training_windows(
    files: Sequence[CodeFile], config: TrainConfig
) -> tuple[list[ContextWindow], list[int]]:
    """All windows of the given files with their gold class indices."""
    window_config = WindowConfig(
        c=config.context_c,
        max_tokens=config.max_tokens,
        reserved_tokens=config.reserved_tokens,
    )
    class_index = {label: i for i, label in enumerate(GOLD_LABELS)}
    windows: list[ContextWindow] = []
    targets: list[int] = []
    for file in files:
        for line in file.lines:
            if line.gold is None:
                raise UnlabeledLine(f"{file.file_id}:{line.line_no} has no gold label")
            window = center_truncate(
                build_window(file, line.line_no, window_config), window_config
            )
            windows.append(window)
            targets.append(class_index[line.gold])
    return windows, targets


def train_local(files: Sequence[CodeFile], config: TrainConfig) -> LocalModel:
    """Mini-batch gradient descent on softmax cross-entropy.

    All randomness (batch shuffling) flows from ``config.seed``; the same
    seed yields bit-identical weights. Per-epoch mean training loss is kept
    on the model for monotonicity checks.
    """
    windows, targets = training_windows(files, config)
    if not windows:
        raise EmptyTrainingSet("no labeled lines in the training files")
    features = [featurize(w, config.feature_dim) for w in windows]
    y = np.asarray(targets, dtype=np.int64)
    n = len(features)
    k = len(GOLD_LABELS)

    rng = np.random.default_rng(config.seed)
    weights = np.zeros((k, config.feature_dim))
    bias = np.zeros(k)
    history: list[float] = []
    for _ in range(config.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for lo in range(0, n, config.batch_size):
            batch = order[lo : lo + config.batch_size]
            dense = _densify([features[i] for i in batch], config.feature_dim)
            loss, grad_w, grad_b = loss_and_gradients(weights, bias, dense, y[batch])
            weights -= config.learning_rate * grad_w
            bias -= config.learning_rate * grad_b
            epoch_loss += loss * len(batch)
        history.append(epoch_loss / n)

    return LocalModel(
        weights=weights,
        bias=bias,
        feature_dim=config.feature_dim,
        seed=config.seed,
        config_hash=config.hash(),
        loss_history=tuple(history),
    )


def predict_local(
    model: LocalModel, window: ContextWindow
) -> tuple[Label, np.ndarray]:
    """Argmax class with the full probability vector.

    Probabilities sum to 1 within 1e-9; ties break toward the earliest
    class in the fixed order, so a zero-weight model predicts the first
    class everywhere.
    """
    vec = featurize(window, model.feature_dim)
    logits = model.bias.copy()
    for idx, value in vec.items():
        logits += model.weights[:, idx] * value
    probs = _softmax(logits)
    return model.classes[int(np.argmax(probs))], probs


def training_accuracy(model: LocalModel, files: Sequence[CodeFile],
                      config: TrainConfig) -> float:
    windows, targets = training_windows(files, config)
    hits = sum(
        1
        for window, target in zip(windows, targets)
        if predict_local(model, window)[0] is GOLD_LABELS[target]
    )
    return hits / len(windows)


def save_model(model: LocalModel, path: str | Path) -> None:
    meta = {
        "feature_dim": model.feature_dim,
        "seed": model.seed,
        "classes": [label.display for label in model.classes],
        "config_hash": model.config_hash,
        "loss_history": list(model.loss_history),
    }
    with Path(path).open("wb") as fh:
        np.savez(fh, weights=model.weights, bias=model.bias,
                 meta=np.frombuffer(json.dumps(meta).encode("utf-8"), dtype=np.uint8))


def load_model(path: str | Path) -> LocalModel:
    with np.load(Path(path)) as data:
        meta = json.loads(bytes(data["meta"]).decode("utf-8"))
        weights = data["weights"]
        bias = data["bias"]
    classes = tuple(Label(name) for name in meta["classes"])
    if weights.shape != (len(classes), meta["feature_dim"]):
        raise DimensionMismatch(
            f"stored weights {weights.shape} do not match metadata"
        )
    return LocalModel(
        weights=weights,
        bias=bias,
        feature_dim=meta["feature_dim"],
        seed=meta["seed"],
        classes=classes,
        config_hash=meta["config_hash"],
        loss_history=tuple(meta["loss_history"]),
    )


class LocalBackend(Backend):
    """Backend wrapper over a trained local model.

    Declares the sequence-model token limit so the pipeline applies
    token-budget centering before prediction.
    """

    token_limit = 512
    concurrency_safe = True

    def __init__(self, model: LocalModel) -> None:
        self.model = model

    @property
    def backend_id(self) -> str:
        return f"local:{self.model.config_hash[:12]}"

    def respond(self, prompt: str, window: ContextWindow | None = None) -> str:
        if window is None:
            raise BackendUnavailable(
                "local classifier does not generate whole-file range output"
            )
        label, _ = predict_local(self.model, window)
        return label.display
