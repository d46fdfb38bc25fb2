# Configuration utilities for lssreduce
# Settings come from the environment, optionally seeded by a .env file

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

from .errors import ConfigError

# Load environment variables
load_dotenv()

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class Settings:
    rank_tol: float = 1e-10
    dt: float = 1e-3
    max_words: int = 1_000_000
    n_jobs: int = 1
    output_dir: Path = Path("output")
    log_level: str = "INFO"


def _read(name: str, cast, default):
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return cast(raw.strip())
    except ValueError as e:
        raise ConfigError(f"{name}={raw!r} in environment/.env is not valid: {e}") from e


def get_settings() -> Settings:
    """
    Build settings from LSS_* environment variables.

    Returns:
        Settings: frozen settings object

    Raises:
        ConfigError: If a variable is present but cannot be parsed or is out of range
    """
    settings = Settings(
        rank_tol=_read("LSS_RANK_TOL", float, Settings.rank_tol),
        dt=_read("LSS_DT", float, Settings.dt),
        max_words=_read("LSS_MAX_WORDS", int, Settings.max_words),
        n_jobs=_read("LSS_N_JOBS", int, Settings.n_jobs),
        output_dir=_read("LSS_OUTPUT_DIR", Path, Settings.output_dir),
        log_level=_read("LSS_LOG_LEVEL", str.upper, Settings.log_level),
    )

    if not settings.rank_tol > 0:
        raise ConfigError(f"LSS_RANK_TOL must be positive, got {settings.rank_tol}")
    if not settings.dt > 0:
        raise ConfigError(f"LSS_DT must be positive, got {settings.dt}")
    if settings.max_words < 1:
        raise ConfigError(f"LSS_MAX_WORDS must be at least 1, got {settings.max_words}")
    if settings.n_jobs == 0 or settings.n_jobs < -1:
        raise ConfigError(f"LSS_N_JOBS must be -1 or at least 1, got {settings.n_jobs}")
    if settings.log_level not in LOG_LEVELS:
        raise ConfigError(f"LSS_LOG_LEVEL={settings.log_level!r} is not a logging level")

    return settings


def configure_logging(level: str | None = None) -> None:
    """Attach one stream handler to the root logger (idempotent)."""
    level = level or get_settings().log_level
    root = logging.getLogger()
    if not any(getattr(h, "_lssreduce", False) for h in root.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._lssreduce = True
        root.addHandler(handler)
    root.setLevel(level)
