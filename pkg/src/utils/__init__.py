"""Utility modules for the Yotta data market."""

from .config import Config, ScenarioConfig, get_config, load_config, load_scenario, reload_config
from .logging import (
    AgentLogger,
    ArtifactWriter,
    console,
    get_logger,
    log_report_table,
    log_sweep_table,
    setup_logging,
)
from .opcount import OpCounts, counting, format_ops, record
from .rng import RunRng

__all__ = [
    "Config",
    "ScenarioConfig",
    "get_config",
    "load_config",
    "load_scenario",
    "reload_config",
    "AgentLogger",
    "ArtifactWriter",
    "console",
    "get_logger",
    "log_report_table",
    "log_sweep_table",
    "setup_logging",
    "OpCounts",
    "counting",
    "format_ops",
    "record",
    "RunRng",
]
