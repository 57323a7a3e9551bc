from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Union

from prometheus_client import CollectorRegistry, Counter, Gauge, Histogram, write_to_textfile

from ..config import load_settings

logger = logging.getLogger(__name__)

REGISTRY = CollectorRegistry()

COVER_CASES = Counter(
    "negpath_cover_cases", "PathCover recursion branches taken", ["case"], registry=REGISTRY
)
KSSSP_LEVELS = Counter(
    "negpath_ksssp_levels", "Restricted-solver recursion levels entered", ["kind"], registry=REGISTRY
)
LAMBDA_RETRIES = Counter(
    "negpath_lambda_retries", "Covers rebuilt with a doubled slack", registry=REGISTRY
)
SCALING_ROUNDS = Counter(
    "negpath_scaling_rounds", "Weight-scaling rounds executed", registry=REGISTRY
)
SOLVE_SECONDS = Histogram(
    "negpath_solve_seconds", "Wall time of top-level solves", ["engine"], registry=REGISTRY
)
CARRIER_GROWTH = Gauge(
    "negpath_carrier_growth", "Carrier edges over base edges on the last cover", registry=REGISTRY
)


def _enabled() -> bool:
    return load_settings().metrics_enabled


def track_cover_case(case: str) -> None:
    if not _enabled():
        return
    COVER_CASES.labels(case).inc()


def track_level(kind: str, growth: Optional[float] = None) -> None:
    if not _enabled():
        return
    logger.debug("prometheus track_level %s growth=%s", kind, growth)
    KSSSP_LEVELS.labels(kind).inc()
    if growth is not None:
        CARRIER_GROWTH.set(growth)


def track_lambda_retry() -> None:
    if _enabled():
        LAMBDA_RETRIES.inc()


def track_round() -> None:
    if _enabled():
        SCALING_ROUNDS.inc()


def track_solve(engine: str, seconds: float) -> None:
    if not _enabled():
        return
    logger.debug("prometheus track_solve %s seconds=%.4f", engine, seconds)
    SOLVE_SECONDS.labels(engine).observe(seconds)


def write_metrics(path: Union[str, Path]) -> None:
    write_to_textfile(str(path), REGISTRY)
