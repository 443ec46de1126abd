"""Pipeline configuration: defaults < config file < environment < flags."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

import yaml

from .application import DEFAULT_TAU
from .category_graph import DEFAULT_ROOT, DEFAULT_STOPWORDS
from .kg_store import OWL_THING

ENV_PREFIX = "CATMINE_"

INPUT_FIELDS = (
    "kg_facts",
    "instance_types",
    "subclass_axioms",
    "disjointness_axioms",
    "category_edges",
    "category_membership",
    "resource_lexicalisations",
    "type_lexicalisations",
    "articles",
)
REQUIRED_INPUTS = ("kg_facts", "category_edges", "category_membership", "resource_lexicalisations")


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    kg_facts: Path | None = None
    instance_types: Path | None = None
    subclass_axioms: Path | None = None
    disjointness_axioms: Path | None = None
    category_edges: Path | None = None
    category_membership: Path | None = None
    resource_lexicalisations: Path | None = None
    # precomputed word counts, added to whatever the articles yield
    type_lexicalisations: Path | None = None
    articles: Path | None = None
    tau: float = DEFAULT_TAU
    functional_threshold: float = 0.05
    min_set_size: int = 2
    root: str = DEFAULT_ROOT
    root_type: str = OWL_THING
    stopwords: tuple[str, ...] = DEFAULT_STOPWORDS
    seed: int = 0
    sample_size: int = 50
    out: Path = Path("out")

    def validate(self, check_inputs: bool = True) -> PipelineConfig:
        if not 0.0 < self.tau < 1.0:
            raise ConfigError(f"tau must lie in (0, 1), got {self.tau}")
        if not 0.0 < self.functional_threshold <= 1.0:
            raise ConfigError(f"functional_threshold must lie in (0, 1], got {self.functional_threshold}")
        if self.min_set_size < 2:
            raise ConfigError(f"min_set_size must be at least 2, got {self.min_set_size}")
        if self.sample_size < 1:
            raise ConfigError("sample_size must be positive")
        if not self.root:
            raise ConfigError("root category id is empty")
        if check_inputs:
            for name in REQUIRED_INPUTS:
                if getattr(self, name) is None:
                    raise ConfigError(f"input '{name}' is not configured")
            for name in INPUT_FIELDS:
                path = getattr(self, name)
                if path is not None and not os.access(path, os.R_OK):
                    raise ConfigError(f"input '{name}' is not readable: {path}")
        return self

    def describe(self) -> str:
        return " ".join(
            f"{f.name}={_render(getattr(self, f.name))}"
            for f in fields(self)
            if f.name not in INPUT_FIELDS and f.name != "out"
        )


def _render(value: Any) -> str:
    if isinstance(value, tuple):
        return ",".join(value)
    return str(value)


def _coerce(name: str, value: Any, base: Path | None = None) -> Any:
    if value is None:
        return None
    try:
        if name in INPUT_FIELDS or name == "out":
            path = Path(os.path.expanduser(str(value)))
            if base is not None and not path.is_absolute():
                path = base / path
            return path
        if name in ("tau", "functional_threshold"):
            return float(value)
        if name in ("min_set_size", "seed", "sample_size"):
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        if name == "stopwords":
            if isinstance(value, str):
                value = value.split(",")
            return tuple(w.strip() for w in value if str(w).strip())
        return str(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid value for {name}: {value!r}") from exc


def _apply(config: PipelineConfig, values: Mapping[str, Any], base: Path | None = None) -> None:
    known = {f.name for f in fields(config)}
    for key, value in values.items():
        name = key.replace("-", "_")
        if name not in known:
            raise ConfigError(f"unknown config key: {key}")
        if value is not None:
            setattr(config, name, _coerce(name, value, base))


def load_config(
    path: Path | str | None = None,
    overrides: Mapping[str, Any] | None = None,
    environ: Mapping[str, str] | None = None,
) -> PipelineConfig:
    """Resolve a configuration. Relative input paths in a config file are
    taken relative to that file."""
    config = PipelineConfig()
    if path is not None:
        path = Path(path)
        try:
            data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must be a mapping")
        _apply(config, data, base=path.parent)
    env = os.environ if environ is None else environ
    names = {f.name for f in fields(config)}
    _apply(config, {
        key[len(ENV_PREFIX):].lower(): value
        for key, value in env.items()
        if key.startswith(ENV_PREFIX) and key[len(ENV_PREFIX):].lower() in names
    })
    if overrides:
        _apply(config, overrides)
    return config
