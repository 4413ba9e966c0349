"""
Configuration management for the Yotta data market.
"""

import os
from pathlib import Path
from typing import Any, Literal, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import InvalidConfig, UnknownEval


class SystemConfig(BaseModel):
    name: str = "Yotta Data Market"
    version: str = "1.0.0"
    log_level: str = "INFO"
    data_dir: str = "data"


class StoreConfig(BaseModel):
    dir: Optional[str] = None

    @property
    def resolved_dir(self) -> Optional[str]:
        """``YOTTA_STORE_DIR`` wins over the file setting."""
        return os.getenv("YOTTA_STORE_DIR") or self.dir


class ProofConfig(BaseModel):
    backend: Literal["recheck"] = "recheck"
    context_label: str = "yotta/reference-backend/v1"


class BenchConfig(BaseModel):
    sweep: list[int] = Field(default_factory=lambda: [10, 100, 1000])
    item_size: int = 1024
    seed: int = 7
    eval_id: str = "schema:csv:f64x3"
    repeats: int = Field(default=3, ge=1)
    deadline_blocks: int = Field(default=10, ge=1)


class PricePolicy(BaseModel):
    model_config = ConfigDict(extra="forbid")

    base: int = Field(default=10, ge=1)
    spread: int = Field(default=0, ge=0)


class AdversaryMix(BaseModel):
    """Share of sellers (percent) assigned to each misbehaviour."""

    model_config = ConfigDict(extra="forbid")

    wrong_key: float = Field(default=0.0, ge=0, le=100)
    failing_f: float = Field(default=0.0, ge=0, le=100)
    proof_replay: float = Field(default=0.0, ge=0, le=100)
    store_tamper: float = Field(default=0.0, ge=0, le=100)
    non_claimer: float = Field(default=0.0, ge=0, le=100)

    @model_validator(mode="after")
    def _total_at_most_100(self) -> "AdversaryMix":
        if sum(self.model_dump().values()) > 100:
            raise ValueError("adversary percentages add up to more than 100")
        return self


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = "scenario"
    seed: int = Field(default=7, ge=0)
    buyers: int = Field(default=1, ge=1)
    sellers: int = Field(default=10, ge=1)
    items_per_seller: int = Field(default=1, ge=1)
    records_per_item: int = Field(default=128, ge=1)
    evals: list[str] = Field(default_factory=lambda: ["min-records:100"], min_length=1)
    price: PricePolicy = Field(default_factory=PricePolicy)
    buyer_balance: Optional[int] = Field(default=None, ge=0)
    adversaries: AdversaryMix = Field(default_factory=AdversaryMix)
    non_funding_buyers: float = Field(default=0.0, ge=0, le=100)
    deadline_blocks: int = Field(default=10, ge=1)
    ledger_mode: Literal["commitment-only", "full-decrypt"] = "commitment-only"
    verification: Literal["individual", "aggregated"] = "aggregated"

    @field_validator("evals")
    @classmethod
    def _registered(cls, evals: list[str]) -> list[str]:
        from ..proof.evals import builtin_eval

        for eval_id in evals:
            try:
                builtin_eval(eval_id)
            except UnknownEval as exc:
                raise ValueError(str(exc)) from exc
        return evals

    def eval_for(self, buyer_index: int) -> str:
        return self.evals[buyer_index % len(self.evals)]


class Config(BaseModel):
    system: SystemConfig = Field(default_factory=SystemConfig)
    store: StoreConfig = Field(default_factory=StoreConfig)
    proof: ProofConfig = Field(default_factory=ProofConfig)
    bench: BenchConfig = Field(default_factory=BenchConfig)
    scenario: ScenarioConfig = Field(default_factory=ScenarioConfig)


def load_config(config_path: Optional[str] = None) -> Config:
    """Load configuration from YAML file."""
    load_dotenv()
    if config_path is None:
        # Look for config.yaml in the project root
        config_path = Path(__file__).parent.parent.parent / "config.yaml"
    else:
        config_path = Path(config_path)

    if config_path.exists():
        with open(config_path, "r") as f:
            config_data = yaml.safe_load(f) or {}
        return Config(**config_data)

    # Return default config if file doesn't exist
    return Config()


# Global config instance
_config: Optional[Config] = None


def get_config() -> Config:
    """Get the global configuration instance."""
    global _config
    if _config is None:
        _config = load_config()
    return _config


def reload_config(config_path: Optional[str] = None) -> Config:
    """Reload the configuration from file."""
    global _config
    _config = load_config(config_path)
    return _config


def load_scenario(path: Optional[str] = None, overrides: Optional[dict[str, Any]] = None) -> ScenarioConfig:
    """
    Read a scenario YAML file and apply command-line overrides.

    Without a path the scenario defaults from ``config.yaml`` are used.
    Any parse or validation problem is reported as ``InvalidConfig``.
    """
    if path is None:
        data = get_config().scenario.model_dump()
    else:
        try:
            with open(path, "r") as f:
                data = yaml.safe_load(f)
        except OSError as exc:
            raise InvalidConfig(f"cannot read scenario {path}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise InvalidConfig(f"scenario {path} is not valid YAML: {exc}") from exc
        if not isinstance(data, dict):
            raise InvalidConfig(f"scenario {path} must be a mapping of settings")

    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return ScenarioConfig(**data)
    except ValidationError as exc:
        raise InvalidConfig(str(exc)) from exc
