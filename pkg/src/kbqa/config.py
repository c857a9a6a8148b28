"""Service configuration: a flat JSON document plus LBKBQA_* environment
overrides. Relative data paths resolve against the config file's directory;
defaults point at the bundled data."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError

BUNDLED_DATA = Path(__file__).resolve().parent / "data"

ENV_PREFIX = "LBKBQA_"

# Keys interpreted as paths (resolved relative to the config file).
_PATH_KEYS = (
    "llm_script",
    "stoplist_path",
    "rules_path",
    "seeds_path",
    "templates_path",
    "triples_path",
    "prompt_dir",
    "eval_dataset",
    "ui_dir",
)


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    tau: float = 0.80
    allow_new_labels: bool = True
    lang: str = "en"
    embedding_provider: str = "mock"  # mock | remote
    embedding_url: str = ""
    embedding_dim: int = 256
    llm_provider: str = "scripted"  # scripted | remote | disabled
    llm_script: str = str(BUNDLED_DATA / "llm_script.jsonl")
    llm_url: str = ""
    provider_timeout: float = 5.0
    stoplist_path: str = str(BUNDLED_DATA / "stopwords_en.txt")
    rules_path: str = str(BUNDLED_DATA / "rules.jsonl")
    seeds_path: str = str(BUNDLED_DATA / "intent_seeds.jsonl")
    templates_path: str = str(BUNDLED_DATA / "query_templates.jsonl")
    triples_path: str = str(BUNDLED_DATA / "triples.csv")
    prompt_dir: str = str(BUNDLED_DATA / "prompts")
    eval_dataset: str = str(BUNDLED_DATA / "eval_cases.jsonl")
    session_timeout: float = 900.0
    disable_rule: bool = False
    disable_embedding: bool = False
    disable_llm: bool = False
    disable_adapt: bool = False
    auth_token: str = ""
    ui_dir: str = ""

    def validate(self) -> None:
        if not 0.0 <= self.tau <= 1.0:
            raise ConfigError(f"tau must be in [0, 1], got {self.tau}")
        if self.provider_timeout <= 0:
            raise ConfigError("provider_timeout must be positive")
        if self.session_timeout <= 0:
            raise ConfigError("session_timeout must be positive")
        if self.embedding_provider not in ("mock", "remote"):
            raise ConfigError(f"unknown embedding_provider {self.embedding_provider!r}")
        if self.embedding_provider == "remote" and not self.embedding_url:
            raise ConfigError("embedding_provider=remote needs embedding_url")
        if self.llm_provider not in ("scripted", "remote", "disabled"):
            raise ConfigError(f"unknown llm_provider {self.llm_provider!r}")
        if self.llm_provider == "remote" and not self.llm_url:
            raise ConfigError("llm_provider=remote needs llm_url")
        required = {
            "stoplist_path": self.stoplist_path,
            "rules_path": self.rules_path,
            "seeds_path": self.seeds_path,
            "templates_path": self.templates_path,
            "triples_path": self.triples_path,
            "prompt_dir": self.prompt_dir,
        }
        if self.llm_provider == "scripted":
            required["llm_script"] = self.llm_script
        for key, value in required.items():
            if not Path(value).exists():
                raise ConfigError(f"{key} does not exist: {value}")

    def with_ablation(
        self,
        disable_rule: bool = False,
        disable_embedding: bool = False,
        disable_llm: bool = False,
        disable_adapt: bool = False,
    ) -> "ServiceConfig":
        return dataclasses.replace(
            self,
            disable_rule=disable_rule,
            disable_embedding=disable_embedding,
            disable_llm=disable_llm,
            disable_adapt=disable_adapt,
        )


def _parse_value(name: str, kind: type, raw: object) -> object:
    if kind is bool:
        if isinstance(raw, bool):
            return raw
        text = str(raw).strip().lower()
        if text in ("1", "true", "yes", "on"):
            return True
        if text in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{name}: cannot parse boolean from {raw!r}")
    try:
        return kind(raw)  # type: ignore[call-arg]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def _apply(config: ServiceConfig, values: dict, base_dir: Path | None) -> ServiceConfig:
    types = {f.name: type(getattr(config, f.name)) for f in dataclasses.fields(config)}
    updates = {}
    for key, raw in values.items():
        if key not in types:
            raise ConfigError(f"unknown config key {key!r}")
        value = _parse_value(key, types[key], raw)
        if key in _PATH_KEYS and base_dir is not None and value:
            value = str((base_dir / str(value)).resolve()) if not Path(str(value)).is_absolute() else value
        updates[key] = value
    return dataclasses.replace(config, **updates)


def apply_env(config: ServiceConfig, environ: dict[str, str] | None = None) -> ServiceConfig:
    env = os.environ if environ is None else environ
    values = {}
    for field in dataclasses.fields(config):
        raw = env.get(ENV_PREFIX + field.name.upper())
        if raw is not None:
            values[field.name] = raw
    return _apply(config, values, base_dir=Path.cwd())


def load_config(path: str | Path | None = None, use_env: bool = True) -> ServiceConfig:
    """Build the effective config: defaults < file < environment."""
    config = ServiceConfig()
    if path is not None:
        p = Path(path)
        try:
            data = json.loads(p.read_text("utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {p}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {p} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {p} must be a flat JSON object")
        config = _apply(config, data, base_dir=p.resolve().parent)
    if use_env:
        config = apply_env(config)
    return config
