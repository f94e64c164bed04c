import math
import os
import sys
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv
from loguru import logger

from .core.errors import ConfigError

LOG_LEVELS = {
    'quiet': 'ERROR',
    'info': 'INFO',
    'debug': 'DEBUG',
}


@dataclass
class BssdConfig:
    log_level: str = "info"
    max_speed_kmh: float = 400.0
    geojson_indent: Optional[int] = None


_active_config: Optional[BssdConfig] = None


def load_config() -> BssdConfig:
    """Build a config from the environment (and a .env file if present)"""
    load_dotenv()

    log_level = os.getenv("BSSD_LOG", "info").strip().lower()
    if log_level not in LOG_LEVELS:
        raise ConfigError(f"BSSD_LOG must be one of {', '.join(LOG_LEVELS)}, got {log_level!r}")

    raw_bound = os.getenv("BSSD_MAX_SPEED_KMH")
    max_speed = 400.0
    if raw_bound:
        try:
            max_speed = float(raw_bound)
        except ValueError:
            raise ConfigError(f"BSSD_MAX_SPEED_KMH is not a number: {raw_bound!r}")
        if not (math.isfinite(max_speed) and max_speed > 0):
            raise ConfigError("BSSD_MAX_SPEED_KMH must be a positive finite number")

    raw_indent = os.getenv("BSSD_GEOJSON_INDENT")
    indent = None
    if raw_indent:
        try:
            indent = int(raw_indent)
        except ValueError:
            raise ConfigError(f"BSSD_GEOJSON_INDENT is not an integer: {raw_indent!r}")
        if indent < 0:
            raise ConfigError("BSSD_GEOJSON_INDENT must not be negative")

    return BssdConfig(log_level=log_level, max_speed_kmh=max_speed, geojson_indent=indent)


def get_config() -> BssdConfig:
    global _active_config
    if _active_config is None:
        _active_config = BssdConfig()
    return _active_config


def set_config(config: BssdConfig) -> None:
    global _active_config
    _active_config = config


def configure_logging(level: str = "info") -> None:
    logger.remove()
    logger.add(sys.stderr, level=LOG_LEVELS.get(level, "INFO"),
               format="{time:HH:mm:ss} {level:<7} {name}: {message}")
