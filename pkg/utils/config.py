# /cs3kit/utils/config.py

import os
from pathlib import Path
from typing import Any, Dict, Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

# --- Directory Paths ---
# Output and cache live under the working directory unless CS3KIT_CACHE_DIR
# points somewhere else.
BASE_DIR = Path(os.getcwd())
DEFAULT_OUTPUT_DIR = BASE_DIR / 'output'

# --- Cache File ---
TABLE_CACHE_KEY = 'subgroup_tables'
TABLE_CACHE_FORMAT = 'cs3kit-tables'
TABLE_CACHE_VERSION = 2

# --- Rewriting Limits ---
DEFAULT_STEP_CAP = 100_000
DEFAULT_PASS_CAP = 200
# release-mode sampling: every n-th rewrite step is re-evaluated
DEFAULT_CHECK_EVERY = 64

# --- Sampling ---
DEFAULT_SEED = 2024
DEFAULT_SAMPLE_SIZE = 100

# --- Environment Variables ---
ENV_CACHE_DIR = 'CS3KIT_CACHE_DIR'
ENV_LOG_LEVEL = 'CS3KIT_LOG_LEVEL'
ENV_WORKERS = 'CS3KIT_WORKERS'


class RunConfig(BaseModel):
    """Resolved configuration for one toolkit command."""

    model_config = ConfigDict(extra='forbid')

    output_dir: Path = DEFAULT_OUTPUT_DIR
    cache_dir: Optional[Path] = None
    log_level: Literal['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'] = 'WARNING'
    log_file: Optional[Path] = None
    debug_verify: bool = False
    step_cap: int = Field(default=DEFAULT_STEP_CAP, gt=0)
    pass_cap: int = Field(default=DEFAULT_PASS_CAP, gt=0)
    check_every: int = Field(default=DEFAULT_CHECK_EVERY, ge=0)
    workers: int = Field(default=1, ge=1)
    output_format: Literal['text', 'json'] = 'text'
    seed: int = DEFAULT_SEED
    sample_size: int = Field(default=DEFAULT_SAMPLE_SIZE, gt=0)

    @property
    def resolved_cache_dir(self) -> Path:
        return self.cache_dir if self.cache_dir is not None else self.output_dir / 'cache'


def deep_update(d: Dict[str, Any], u: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively merge ``u`` into ``d`` (in place) and return ``d``."""
    for k, v in u.items():
        if isinstance(v, dict) and isinstance(d.get(k), dict):
            deep_update(d[k], v)
        else:
            d[k] = v
    return d


def _environment_overrides() -> Dict[str, Any]:
    load_dotenv()
    overrides: Dict[str, Any] = {}
    if os.environ.get(ENV_CACHE_DIR):
        overrides['cache_dir'] = os.environ[ENV_CACHE_DIR]
    if os.environ.get(ENV_LOG_LEVEL):
        overrides['log_level'] = os.environ[ENV_LOG_LEVEL].upper()
    if os.environ.get(ENV_WORKERS):
        overrides['workers'] = int(os.environ[ENV_WORKERS])
    return overrides


def load_run_config(config_file: Optional[Path] = None,
                    overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Build a RunConfig from defaults, an optional JSON file, the environment
    and explicit overrides (usually CLI flags), in that order of precedence.

    Args:
        config_file: Optional JSON file with RunConfig fields
        overrides: Values that win over everything else; None entries are ignored

    Returns:
        Validated RunConfig (unknown keys raise pydantic.ValidationError)
    """
    from utils.file_utils import get_file_utils

    merged: Dict[str, Any] = RunConfig().model_dump()
    if config_file is not None:
        loaded = get_file_utils().load_json(config_file)
        if loaded is None:
            raise FileNotFoundError(f"Config file not readable: {config_file}")
        deep_update(merged, loaded)
    deep_update(merged, _environment_overrides())
    if overrides:
        deep_update(merged, {k: v for k, v in overrides.items() if v is not None})
    return RunConfig.model_validate(merged)
