"""Experiment configuration: a flat ``key = value`` text file.

Grammar
-------
* one ``key = value`` pair per line; ``#`` starts a comment;
* list values are comma separated (``dims = 2, 5``);
* relative paths are resolved against the directory of the config file;
* unknown keys and repeated keys are errors.

Keys (defaults in brackets)
---------------------------
dims [2]; s_schedule [10, 15, 20, 25, 50]; max_fe_multiplier [100]; k [4];
trials [31]; scheme [LOFO] (LOFO, LOIO or both as a list); master_seed [0];
archive [archive.csv]; feature_cache [features.csv]; output_dir [out];
feature_classes [all]; portfolio_mode [both] (aware, ignorant or both);
optimizers [every id of the default zoo]; archive_trials [1];
restarts [20]; iterations [1000]; objective [min_rank]; target [log10];
n_trees [100].
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace

from .bench.folds import SCHEMES
from .ela import FEATURE_CLASSES
from .portfolio import OBJECTIVES
from .sample import MAX_FE_MULTIPLIER, S_PRESETS
from .selector import TARGETS
from .zoo import DEFAULT_ZOO

DIMS = (2, 3, 5, 10)
PORTFOLIO_MODES = ("aware", "ignorant", "both")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    dims: tuple = (2,)
    s_schedule: tuple = S_PRESETS
    max_fe_multiplier: int = MAX_FE_MULTIPLIER
    k: int = 4
    trials: int = 31
    scheme: tuple = ("LOFO",)
    master_seed: int = 0
    archive: str = "archive.csv"
    feature_cache: str = "features.csv"
    output_dir: str = "out"
    feature_classes: tuple = FEATURE_CLASSES
    portfolio_mode: str = "both"
    optimizers: tuple = field(default_factory=lambda: tuple(s.id for s in DEFAULT_ZOO))
    archive_trials: int = 1
    restarts: int = 20
    iterations: int = 1000
    objective: str = "min_rank"
    target: str = "log10"
    n_trees: int = 100

    def validate(self) -> "ExperimentConfig":
        if not self.dims:
            raise ConfigError("dims must be non-empty")
        bad = [d for d in self.dims if d not in DIMS]
        if bad:
            raise ConfigError(f"dims must be a subset of {DIMS}, got {bad}")
        if self.max_fe_multiplier != MAX_FE_MULTIPLIER:
            raise ConfigError(f"max_fe_multiplier is fixed at {MAX_FE_MULTIPLIER}")
        if not self.s_schedule:
            raise ConfigError("s_schedule must be non-empty")
        for s in self.s_schedule:
            if not 1 <= s < self.max_fe_multiplier:
                raise ConfigError(
                    f"s multiplier {s}: the sample must leave budget for the optimizer "
                    f"(need 1 <= s < {self.max_fe_multiplier})"
                )
        if len(set(self.s_schedule)) != len(self.s_schedule):
            raise ConfigError("s_schedule has repeated values")
        for name in ("k", "trials", "archive_trials", "restarts", "iterations", "n_trees"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be an unsigned 64-bit integer")
        for s in self.scheme:
            if s not in SCHEMES:
                raise ConfigError(f"scheme must be among {SCHEMES}, got {s!r}")
        unknown = set(self.feature_classes) - set(FEATURE_CLASSES)
        if unknown or not self.feature_classes:
            raise ConfigError(f"feature_classes must be a non-empty subset of {FEATURE_CLASSES}")
        if self.portfolio_mode not in PORTFOLIO_MODES:
            raise ConfigError(f"portfolio_mode must be one of {PORTFOLIO_MODES}")
        zoo = {s.id for s in DEFAULT_ZOO}
        if set(self.optimizers) - zoo:
            raise ConfigError(f"unknown optimizers {sorted(set(self.optimizers) - zoo)}")
        if len(self.optimizers) < self.k:
            raise ConfigError(f"need at least k={self.k} optimizers")
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"objective must be one of {OBJECTIVES}")
        if self.target not in TARGETS:
            raise ConfigError(f"target must be one of {TARGETS}")
        return self


_INT = {"max_fe_multiplier", "k", "trials", "master_seed", "archive_trials", "restarts",
        "iterations", "n_trees"}  # fmt: skip
_INT_LIST = {"dims", "s_schedule"}
_STR_LIST = {"scheme", "feature_classes", "optimizers"}
_PATHS = {"archive", "feature_cache", "output_dir"}


def parse_config(text, base_dir=".") -> ExperimentConfig:
    known = {f.name for f in fields(ExperimentConfig)}
    values = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value'")
        key, val = (t.strip() for t in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"line {n}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {n}: {key!r} given twice")
        try:
            if key in _INT:
                values[key] = int(val)
            elif key in _INT_LIST:
                values[key] = tuple(int(t) for t in val.split(","))
            elif key in _STR_LIST:
                values[key] = tuple(t.strip() for t in val.split(",") if t.strip())
            else:
                values[key] = val
        except ValueError:
            raise ConfigError(f"line {n}: bad value for {key!r}: {val!r}") from None
    if "scheme" in values:
        values["scheme"] = tuple(s.upper() for s in values["scheme"])
        if values["scheme"] == ("BOTH",):
            values["scheme"] = SCHEMES
    for key in _PATHS:
        values[key] = os.path.normpath(
            os.path.join(base_dir, values.get(key, getattr(ExperimentConfig, key)))
        )
    return ExperimentConfig(**values).validate()


def load_config(path, **overrides) -> ExperimentConfig:
    with open(path) as fh:
        cfg = parse_config(fh.read(), os.path.dirname(os.path.abspath(path)))
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, **overrides).validate() if overrides else cfg
