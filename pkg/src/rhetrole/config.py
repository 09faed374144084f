"""Run configuration: defaults, the three built-in run presets, and the
flags > file > preset resolution used by the CLI.

A resolved config written next to a checkpoint is a closed description of
the run: feeding it back through ``train --config`` reproduces the training
bit for bit (given the same corpus file).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Mapping

from .corpus import LABELS, SPLIT_MODES
from .embedding import CASINGS
from .errors import ConfigError
from .imbalance import WEIGHT_SCHEMES
from .linear_model import SELECTION_METRICS

BALANCE_METHODS = ("loss_weighting", "undersample", "oversample", "none")

# The three submitted runs share every hyperparameter; they differ only in
# casing and in which way the class weights lean.
PRESETS: dict[str, dict[str, Any]] = {
    "run1": {"casing": "cased", "weight_scheme": "inverse_frequency", "balance": "loss_weighting"},
    "run2": {"casing": "uncased", "weight_scheme": "inverse_frequency", "balance": "loss_weighting"},
    "run3": {"casing": "cased", "weight_scheme": "direct_frequency", "balance": "loss_weighting"},
}


@dataclass
class RunConfig:
    run_id: str = "custom"
    preset: str | None = None
    corpus: str | None = None
    casing: str = "cased"
    weight_scheme: str = "inverse_frequency"
    balance: str = "loss_weighting"
    weight_overrides: dict[str, float] | None = None
    provider: str = "hashed:256"
    max_len: int | None = None  # None: derive from length_percentile_q at train time
    length_percentile_q: float = 0.98
    train_fraction: float = 0.8
    split_mode: str = "sentence_shuffled"
    batch_size: int = 8
    epochs: int = 4
    learning_rate: float = 2e-5
    weight_decay: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    seed: int = 42
    selection_metric: str = "macro_f1"

    _INT_FIELDS = ("batch_size", "epochs", "seed")
    _REAL_FIELDS = (
        "learning_rate", "weight_decay", "beta1", "beta2", "epsilon",
        "train_fraction", "length_percentile_q",
    )

    def validate(self) -> None:
        for name in self._INT_FIELDS:
            if not isinstance(getattr(self, name), int):
                raise ConfigError(f"{name} must be an integer")
        if self.max_len is not None and not isinstance(self.max_len, int):
            raise ConfigError("max_len must be an integer")
        for name in self._REAL_FIELDS:
            if not isinstance(getattr(self, name), (int, float)):
                raise ConfigError(f"{name} must be a number")
        if self.casing not in CASINGS:
            raise ConfigError(f"casing must be one of {CASINGS}, got {self.casing!r}")
        if self.weight_scheme not in WEIGHT_SCHEMES:
            raise ConfigError(
                f"weight_scheme must be one of {WEIGHT_SCHEMES}, got {self.weight_scheme!r}"
            )
        if self.balance not in BALANCE_METHODS:
            raise ConfigError(f"balance must be one of {BALANCE_METHODS}, got {self.balance!r}")
        if self.split_mode not in SPLIT_MODES:
            raise ConfigError(f"split_mode must be one of {SPLIT_MODES}")
        if self.selection_metric not in SELECTION_METRICS:
            raise ConfigError(f"selection_metric must be one of {SELECTION_METRICS}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("train_fraction must lie strictly between 0 and 1")
        if not 0.0 < self.length_percentile_q <= 1.0:
            raise ConfigError("length_percentile_q must lie in (0, 1]")
        if self.max_len is not None and self.max_len < 1:
            raise ConfigError("max_len must be >= 1 when given")
        if self.weight_overrides:
            for label, value in self.weight_overrides.items():
                if label not in LABELS:
                    raise ConfigError(f"weight override for unknown label {label!r}")
                if value < 0:
                    raise ConfigError(f"weight override for {label!r} must be >= 0")
        self._parse_provider()
        # Exactly one balancing method may be active. Loss weighting needs a
        # non-uniform scheme or explicit weights; the other methods must not
        # smuggle in a weighting scheme on the side.
        if self.balance == "loss_weighting":
            if self.weight_scheme == "uniform" and not self.weight_overrides:
                raise ConfigError(
                    "balance=loss_weighting needs a non-uniform weight_scheme "
                    "or explicit weight_overrides"
                )
        else:
            if self.weight_scheme != "uniform" or self.weight_overrides:
                raise ConfigError(
                    f"balance={self.balance} must keep weight_scheme=uniform "
                    "and no weight_overrides (exactly one balancing method)"
                )

    def _parse_provider(self) -> tuple[str, Any]:
        spec = self.provider
        if spec.startswith("hashed:"):
            try:
                dim = int(spec.split(":", 1)[1])
            except ValueError:
                raise ConfigError(f"bad hashed provider spec {spec!r}") from None
            if dim < 1:
                raise ConfigError("hashed provider dimension must be >= 1")
            return "hashed", dim
        if spec.startswith("precomputed:"):
            path = spec.split(":", 1)[1]
            if not path:
                raise ConfigError("precomputed provider spec needs a file path")
            return "precomputed", path
        raise ConfigError(
            f"provider must be 'hashed:<dim>' or 'precomputed:<path>', got {spec!r}"
        )

    @property
    def provider_kind(self) -> str:
        return self._parse_provider()[0]

    @property
    def provider_arg(self) -> Any:
        return self._parse_provider()[1]


_FIELD_NAMES = {f.name for f in fields(RunConfig)}


def resolve_config(
    preset: str | None = None,
    file_config: Mapping[str, Any] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> RunConfig:
    """Layer defaults < preset < config file < explicit flag overrides.

    A config file may itself name a preset; an explicit ``preset`` argument
    wins over that. The resulting config is validated.
    """
    file_config = dict(file_config or {})
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}

    # A resolved config carries informational outputs; anything else unknown
    # is a typo and must not be dropped silently.
    bookkeeping = {"resolved_class_weights", "resolved_provider_id"}
    unknown = set(file_config) - _FIELD_NAMES - bookkeeping
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    for key in bookkeeping:
        file_config.pop(key, None)

    preset_name = preset or file_config.get("preset")
    merged: dict[str, Any] = {}
    if preset_name is not None:
        if preset_name not in PRESETS:
            raise ConfigError(f"unknown preset {preset_name!r}; expected one of {sorted(PRESETS)}")
        merged.update(PRESETS[preset_name])
        merged["preset"] = preset_name
        merged["run_id"] = preset_name
    merged.update(file_config)
    if preset_name is not None:
        merged["preset"] = preset_name
        merged.setdefault("run_id", preset_name)
    merged.update(overrides)

    unknown = set(merged) - _FIELD_NAMES
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    cfg = RunConfig(**merged)
    cfg.validate()
    return cfg


def config_to_json(
    cfg: RunConfig,
    resolved_weights: Mapping[str, float] | None = None,
    resolved_max_len: int | None = None,
    resolved_provider_id: str | None = None,
) -> str:
    """Resolved-config JSON. The resolved_* entries are informational
    outputs of the run; re-running re-derives them from the same inputs."""
    doc = asdict(cfg)
    if resolved_max_len is not None:
        doc["max_len"] = resolved_max_len
    if resolved_weights is not None:
        doc["resolved_class_weights"] = dict(resolved_weights)
    if resolved_provider_id is not None:
        doc["resolved_provider_id"] = resolved_provider_id
    return json.dumps(doc, indent=2) + "\n"


def load_config_file(path: str | Path) -> dict[str, Any]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return doc
