"""Run configuration: a flat TOML table checked against a fixed schema.

Example::

    task = "rastrigin-2"
    container = "mour-qd"
    profile = "desk"
    seed = 1

Keys not listed in :data:`SCHEMA` are rejected. A profile supplies defaults
for the budget and container sizes; keys set explicitly in the file win.
"""
from __future__ import annotations

import dataclasses
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .tasks import TASK_NAMES, get_task

CONTAINERS = ("mour-qd", "mome", "mome-small", "mome-large", "mo-aurora-grid")
TARGET_FRACTION = 0.95

PROFILES = {
    "paper": {"iterations": 4000, "batch_size": 256, "cvt_cells": 512, "max_front_size": 10},
    "desk": {"iterations": 200, "batch_size": 64, "cvt_cells": 128, "max_front_size": 5},
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    task: str
    container: str = "mour-qd"
    profile: Optional[str] = None
    iterations: int = 4000
    batch_size: int = 256
    cvt_cells: int = 512
    max_front_size: int = 10
    # derived as cvt_cells * max_front_size when left unset
    capacity: Optional[int] = None
    sigma_iso: float = 0.005
    sigma_line: float = 0.05
    # None means the task's default
    initial_l: Optional[float] = None
    csc_k: Optional[float] = None
    n_target: Optional[int] = None
    latent_dim: Optional[int] = None
    retrain: bool = True
    metrics_interval: int = 10
    seed: int = 0
    cvt_seed: int = 0
    cvt_samples: int = 50_000
    output_dir: str = "runs/run"

    def __post_init__(self):
        if self.capacity is None:
            self.capacity = self.cvt_cells * self.max_front_size
        self.validate()

    # -- derived values ---------------------------------------------------

    @property
    def task_spec(self):
        return get_task(self.task).spec

    @property
    def l(self) -> float:
        return self.initial_l if self.initial_l is not None else self.task_spec.initial_l

    @property
    def k(self) -> Optional[float]:
        return self.csc_k if self.csc_k is not None else self.task_spec.csc_k

    @property
    def target_size(self) -> int:
        return self.n_target if self.n_target is not None else int(round(TARGET_FRACTION * self.capacity))

    @property
    def latent(self) -> int:
        if self.latent_dim is not None:
            return self.latent_dim
        return self.task_spec.latent_dim or self.task_spec.feature_dim

    @property
    def learned(self) -> bool:
        """Whether features come from a learned encoder (MOME always uses true features)."""
        return self.task_spec.learned_features and self.container in ("mour-qd", "mo-aurora-grid")

    def validate(self) -> None:
        if self.task not in TASK_NAMES:
            raise ConfigError(f"unknown task {self.task!r}; choose from {', '.join(TASK_NAMES)}")
        if self.container not in CONTAINERS:
            raise ConfigError(f"unknown container {self.container!r}; choose from {', '.join(CONTAINERS)}")
        if self.profile is not None and self.profile not in PROFILES:
            raise ConfigError(f"unknown profile {self.profile!r}")
        for name in ("batch_size", "cvt_cells", "max_front_size", "metrics_interval", "cvt_samples"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1")
        if self.iterations < 0:
            raise ConfigError("iterations must be non-negative")
        if self.capacity != self.cvt_cells * self.max_front_size:
            raise ConfigError(
                f"capacity ({self.capacity}) must equal cvt_cells * max_front_size "
                f"({self.cvt_cells * self.max_front_size}) so containers hold the same population"
            )
        if self.sigma_iso < 0 or self.sigma_line < 0:
            raise ConfigError("isoline sigmas must be non-negative")
        if self.initial_l is not None and not self.initial_l > 0:
            raise ConfigError("initial_l must be positive")
        if self.csc_k is not None and not self.csc_k > 0:
            raise ConfigError("csc_k must be positive")
        if self.n_target is not None and not 1 <= self.n_target <= self.capacity:
            raise ConfigError("n_target must lie in [1, capacity]")
        spec = self.task_spec
        if self.container == "mome-small" and spec.small_bounds is None:
            raise ConfigError(f"task {self.task} defines no underestimated bounds for mome-small")
        if self.container == "mome-large" and spec.large_bounds is None:
            raise ConfigError(f"task {self.task} defines no overestimated bounds for mome-large")
        if self.container == "mo-aurora-grid" and not spec.learned_features:
            raise ConfigError(f"mo-aurora-grid needs a task with learned features, {self.task} has none")

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)


SCHEMA = {f.name: f for f in dataclasses.fields(RunConfig)}
_TYPES = {"int": (int,), "float": (int, float), "str": (str,), "bool": (bool,)}


def _check_type(key: str, value: Any) -> Any:
    hint = str(SCHEMA[key].type).replace("Optional[", "").rstrip("]")
    allowed = _TYPES.get(hint)
    if allowed is None:
        return value
    if isinstance(value, bool) and hint != "bool":
        raise ConfigError(f"{key} must be {hint}, got bool")
    if not isinstance(value, allowed):
        raise ConfigError(f"{key} must be {hint}, got {type(value).__name__}")
    return float(value) if hint == "float" else value


def from_mapping(values: dict[str, Any], profile: Optional[str] = None) -> RunConfig:
    unknown = sorted(set(values) - set(SCHEMA))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    if "task" not in values:
        raise ConfigError("config must set 'task'")
    values = {k: _check_type(k, v) for k, v in values.items()}
    profile = profile or values.get("profile")
    merged: dict[str, Any] = {}
    if profile is not None:
        if profile not in PROFILES:
            raise ConfigError(f"unknown profile {profile!r}; choose from {', '.join(PROFILES)}")
        merged.update(PROFILES[profile])
    merged.update(values)
    merged["profile"] = profile
    return RunConfig(**merged)


def load_config(path, profile: Optional[str] = None, **overrides) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            values = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    values.update({k: v for k, v in overrides.items() if v is not None})
    return from_mapping(values, profile)


def dump_config(cfg: RunConfig, path) -> None:
    with open(path, "w") as fh:
        json.dump(cfg.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_config_json(path) -> RunConfig:
    with open(path) as fh:
        return RunConfig(**json.load(fh))
