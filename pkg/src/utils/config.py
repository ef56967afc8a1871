"""
Configuration loading utilities.
"""

import logging
import os
import sys
from pathlib import Path
from typing import Optional
import yaml

from dotenv import load_dotenv

from src.models import ToolSettings


LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"


def get_project_root() -> Path:
    """Get the project root directory."""
    return Path(__file__).parent.parent.parent


def load_env() -> None:
    """Load environment variables from .env file."""
    env_path = get_project_root() / ".env"
    load_dotenv(env_path)


def load_settings(path: Optional[Path] = None) -> ToolSettings:
    """
    Load tool settings from config/settings.yaml (or TPB_SETTINGS),
    then apply the TPB_LOG_LEVEL and TPB_PARALLEL overrides.
    """
    if path is None:
        override = os.getenv("TPB_SETTINGS")
        path = Path(override) if override else get_project_root() / "config" / "settings.yaml"

    data = {}
    if Path(path).exists():
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    settings = ToolSettings(**data)

    level = os.getenv("TPB_LOG_LEVEL")
    if level:
        settings.logging["level"] = level.upper()
    parallel = os.getenv("TPB_PARALLEL")
    if parallel:
        try:
            settings.runtime["parallel"] = int(parallel)
        except ValueError:
            raise ValueError(f"TPB_PARALLEL must be an integer, got {parallel!r}")
    return settings


def setup_logging(level: str = "WARNING") -> None:
    """Route library logging to stderr; stdout stays reserved for JSON."""
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root = logging.getLogger()
    for existing in list(root.handlers):
        root.removeHandler(existing)
    root.addHandler(handler)
    root.setLevel(getattr(logging, str(level).upper(), logging.WARNING))
