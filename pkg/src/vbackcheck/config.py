"""Application configuration: one JSON document.

Layout (all sections optional unless a command needs them):

{
  "backends": {
    "mode": "stub" | "remote",
    "strict": false,
    "stub_tables": {"ground": path, "score": path, "similarity": path,
                    "generate": path},
    "score_default": 0.0,
    "similarity_default": 0.0,
    "remote": {"ground_url": str, "score_url": str, "similarity_url": str,
               "generate_url": str, "max_retries": 3}
  },
  "pipeline": { ...PipelineConfig fields... },
  "loss": {"special_weight": 2.0, "dice_epsilon": 1.0, "grounding_weight": 1.0},
  "data": {"proposals": path, "image_dir": path | null, "bench": path,
           "journal": path, "finals": path},
  "service": {"host": "127.0.0.1", "port": 8000, "static_dir": path | null},
  "annotation_quorum": 3
}

The config path may also come from the VBACKCHECK_CONFIG environment
variable.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .backends import (
    RemoteGenerator,
    RemoteGrounder,
    RemoteScorer,
    RemoteSimilarity,
    StubGenerator,
    StubGrounder,
    StubScorer,
    StubSimilarity,
)
from .errors import ConfigurationError
from .rinstruct.config import PipelineConfig
from .tuneloss.losses import LossConfig

CONFIG_ENV_VAR = "VBACKCHECK_CONFIG"


@dataclass(frozen=True)
class AppConfig:
    backends: dict = field(default_factory=dict)
    pipeline: PipelineConfig = PipelineConfig()
    loss: LossConfig = LossConfig()
    data: dict = field(default_factory=dict)
    service: dict = field(default_factory=dict)
    annotation_quorum: int = 3

    def __post_init__(self):
        if self.annotation_quorum != 3:
            raise ConfigurationError("annotation quorum is fixed at 3")


def load_config(path: Optional[str | Path] = None) -> AppConfig:
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    if path is None:
        raise ConfigurationError(
            f"no config path given and {CONFIG_ENV_VAR} is unset"
        )
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"config file not found: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file is not valid JSON: {exc}") from exc

    try:
        cfg = AppConfig(
            backends=raw.get("backends", {}),
            pipeline=PipelineConfig.from_json(raw.get("pipeline", {})),
            loss=LossConfig(**raw.get("loss", {})),
            data=raw.get("data", {}),
            service=raw.get("service", {}),
            annotation_quorum=raw.get("annotation_quorum", 3),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"invalid config: {exc}") from exc

    if cfg.backends.get("strict"):
        for name, table_path in (cfg.backends.get("stub_tables") or {}).items():
            if not Path(table_path).exists():
                raise ConfigurationError(
                    f"strict mode: stub table for {name!r} not found: {table_path}"
                )
    return cfg


@dataclass(frozen=True)
class BackendSet:
    grounder: object
    scorer: object
    similarity: object
    generator: object


def build_backends(cfg: AppConfig) -> BackendSet:
    conf = cfg.backends
    mode = conf.get("mode", "stub")
    strict = bool(conf.get("strict", False))

    if mode == "stub":
        tables = conf.get("stub_tables") or {}

        def table(name: str) -> Optional[Path]:
            if name not in tables:
                return None
            path = Path(tables[name])
            if not path.exists():
                raise ConfigurationError(
                    f"stub table for {name!r} not found: {path}"
                )
            return path

        ground_path = table("ground")
        score_path = table("score")
        sim_path = table("similarity")
        gen_path = table("generate")
        return BackendSet(
            grounder=StubGrounder.from_jsonl(ground_path, strict=strict)
            if ground_path
            else StubGrounder(strict=strict),
            scorer=StubScorer.from_jsonl(
                score_path, default=conf.get("score_default", 0.0), strict=strict
            )
            if score_path
            else StubScorer(default=conf.get("score_default", 0.0), strict=strict),
            similarity=StubSimilarity.from_jsonl(
                sim_path, default=conf.get("similarity_default", 0.0), strict=strict
            )
            if sim_path
            else StubSimilarity(
                default=conf.get("similarity_default", 0.0), strict=strict
            ),
            generator=StubGenerator.from_jsonl(gen_path, strict=strict)
            if gen_path
            else StubGenerator(strict=strict),
        )

    if mode == "remote":
        remote = conf.get("remote") or {}
        retries = remote.get("max_retries", 3)

        def url(name: str) -> str:
            value = remote.get(name)
            if not value:
                raise ConfigurationError(f"remote backend url {name!r} missing")
            return value

        return BackendSet(
            grounder=RemoteGrounder(url("ground_url"), max_retries=retries),
            scorer=RemoteScorer(url("score_url"), max_retries=retries),
            similarity=RemoteSimilarity(url("similarity_url"), max_retries=retries),
            generator=RemoteGenerator(url("generate_url"), max_retries=retries),
        )

    raise ConfigurationError(f"unknown backend mode {mode!r}")
