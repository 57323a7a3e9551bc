from __future__ import annotations

import json
import logging
from logging.config import dictConfig
from typing import Optional

from .config import load_settings


class JsonLineFormatter(logging.Formatter):
    """One JSON object per record, for log shippers."""

    def format(self, record: logging.LogRecord) -> str:
        payload = {
            "ts": self.formatTime(record),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        if record.exc_info:
            payload["exc"] = self.formatException(record.exc_info)
        return json.dumps(payload, sort_keys=True)


def setup_logging(level: Optional[str] = None, fmt: Optional[str] = None) -> None:
    settings = load_settings()
    level = (level or settings.log_level).upper()
    fmt = fmt or settings.log_format
    formatter = {"()": JsonLineFormatter} if fmt == "json" else {
        "format": "%(asctime)s %(levelname)s %(name)s %(message)s",
    }
    config = {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {"default": formatter},
        "handlers": {
            "console": {
                "class": "logging.StreamHandler",
                "formatter": "default",
                "level": level,
                "stream": "ext://sys.stderr",
            }
        },
        "root": {
            "handlers": ["console"],
            "level": level,
        },
    }
    dictConfig(config)
