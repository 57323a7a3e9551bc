from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)
ENV_PREFIX = "NEGPATH_"

PRESETS = {"practical", "paper"}
LOG_FORMATS = {"plain", "json"}


def _env(name: str, default: Optional[str] = None) -> Optional[str]:
    return os.environ.get(f"{ENV_PREFIX}{name}", default)


def _as_int(name: str, default: int, minimum: Optional[int] = None) -> int:
    raw = _env(name)
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning("Invalid int for %s: %s. Using default %s.", name, raw, default)
        return default
    if minimum is not None and value < minimum:
        logger.warning("%s must be >= %s, got %s. Using default %s.", name, minimum, value, default)
        return default
    return value


def _as_bool(name: str, default: bool) -> bool:
    raw = _env(name)
    if not raw:
        return default
    return raw.strip().lower() in {"1", "true", "yes", "on"}


def _as_choice(name: str, default: str, choices: set[str]) -> str:
    raw = _env(name)
    if not raw:
        return default
    value = raw.strip().lower()
    if value not in choices:
        logger.warning("Invalid value for %s: %s. Using default %s.", name, raw, default)
        return default
    return value


@dataclass(slots=True)
class Settings:
    preset: str = "practical"
    lam: int = 16
    base_k: int = 32
    lambda_retries: int = 6
    exhaustive_budget: int = 2_000_000
    check_invariants: bool = False
    scale_offset: int = 1
    log_level: str = "INFO"
    log_format: str = "plain"
    metrics_enabled: bool = True

    @property
    def paper_preset(self) -> bool:
        return self.preset == "paper"


@lru_cache(maxsize=1)
def load_settings() -> Settings:
    load_dotenv(override=False)
    return Settings(
        preset=_as_choice("PRESET", "practical", PRESETS),
        lam=_as_int("LAMBDA", 16, minimum=1),
        base_k=_as_int("BASE_K", 32, minimum=0),
        lambda_retries=_as_int("LAMBDA_RETRIES", 6, minimum=0),
        exhaustive_budget=_as_int("EXHAUSTIVE_BUDGET", 2_000_000, minimum=1),
        check_invariants=_as_bool("CHECK_INVARIANTS", False),
        scale_offset=_as_int("SCALE_OFFSET", 1, minimum=1),
        log_level=(_env("LOG_LEVEL", "INFO") or "INFO").upper(),
        log_format=_as_choice("LOG_FORMAT", "plain", LOG_FORMATS),
        metrics_enabled=_as_bool("METRICS", True),
    )
