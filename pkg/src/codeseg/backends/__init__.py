"""Pluggable line classifiers and whole-file generators."""

from ..labels import normalize_label
from .base import Backend, BackendResponse, classify_line, respond_cached
from .cache import ResponseCache, load_response_records, response_key, write_response_records
from .fewshot import (
    Demonstration,
    demonstrations_from_files,
    pool_embeddings,
    select_fewshot,
)
from .heuristic import HeuristicBackend, heuristic_classify
from .local import (
    DEFAULT_FEATURE_DIM,
    LocalBackend,
    LocalModel,
    TrainConfig,
    featurize,
    load_model,
    loss_and_gradients,
    predict_local,
    save_model,
    train_local,
    training_accuracy,
)
from .remote import RemoteBackend, RemoteConfig
from .replay import ReplayBackend

__all__ = [
    "Backend",
    "BackendResponse",
    "DEFAULT_FEATURE_DIM",
    "Demonstration",
    "HeuristicBackend",
    "LocalBackend",
    "LocalModel",
    "RemoteBackend",
    "RemoteConfig",
    "ReplayBackend",
    "ResponseCache",
    "TrainConfig",
    "classify_line",
    "demonstrations_from_files",
    "featurize",
    "heuristic_classify",
    "load_model",
    "load_response_records",
    "loss_and_gradients",
    "normalize_label",
    "pool_embeddings",
    "predict_local",
    "respond_cached",
    "response_key",
    "save_model",
    "select_fewshot",
    "train_local",
    "training_accuracy",
    "write_response_records",
]
