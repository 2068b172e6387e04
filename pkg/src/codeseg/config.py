"""Run configuration: file loading, flag overrides, and hashing."""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

APPROACHES = ("line_by_line", "range_based")
BACKENDS = ("heuristic", "local", "remote", "replay")

#: CLI shorthand for the approach flag.
APPROACH_ALIASES = {"line": "line_by_line", "range": "range_based"}


@dataclass
class RunConfig:
    """Everything a run needs; a TOML/JSON file plus flag overrides.

    Flags win over file values. All randomness in a run flows from ``seed``.
    ``range_based`` runs ignore ``context_c``.
    """

    approach: str = "line_by_line"
    backend: str = "heuristic"
    context_c: int = 3
    max_tokens: int = 512
    reserved_tokens: int = 2
    prompt_mode: str = "zero_shot"
    shots: int = 16
    repair_policy: str = "first_wins_fill_invalid"
    seed: int = 0
    split: str = "test"
    language: str = "R"
    max_in_flight: int = 4
    lenient: bool = True
    input_path: str | None = None
    cache_path: str | None = None
    output_path: str | None = None
    # backend settings
    replay_file: str | None = None
    model_path: str | None = None
    remote: dict = field(default_factory=dict)
    # training settings
    epochs: int = 50
    learning_rate: float = 0.5
    feature_dim: int = 4096
    batch_size: int = 32

    def validate(self) -> None:
        if self.approach not in APPROACHES:
            raise ValueError(f"unknown approach {self.approach!r}")
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.prompt_mode not in ("zero_shot", "carp_few_shot"):
            raise ValueError(f"unknown prompt mode {self.prompt_mode!r}")
        if self.prompt_mode == "carp_few_shot" and self.shots < 1:
            raise ValueError("carp_few_shot requires shots >= 1")
        if self.repair_policy not in ("strict", "first_wins_fill_invalid"):
            raise ValueError(f"unknown repair policy {self.repair_policy!r}")
        if self.backend == "replay" and not self.replay_file:
            raise ValueError("replay backend needs replay_file")

    def hash(self) -> str:
        """Digest of the run-defining fields.

        Output and cache locations do not affect results and are excluded,
        so reruns into different directories stay byte-identical.
        """
        payload = asdict(self)
        payload.pop("output_path")
        payload.pop("cache_path")
        canonical = json.dumps(payload, sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_run_config(path: str | Path) -> RunConfig:
    """Read a .toml or .json config file into a RunConfig."""
    path = Path(path)
    if path.suffix == ".toml":
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    elif path.suffix == ".json":
        data = json.loads(path.read_text(encoding="utf-8"))
    else:
        raise ValueError(f"config must be .toml or .json, got {path.name}")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return RunConfig(**data)


def apply_overrides(config: RunConfig, **overrides: object) -> RunConfig:
    """Return a copy with every non-None override applied (flags win)."""
    for name, value in overrides.items():
        if value is not None:
            setattr(config, name, value)
    return config
