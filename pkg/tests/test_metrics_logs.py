from __future__ import annotations

import json
import logging
import sys

from negpath.graph import Graph
from negpath.logs import JsonLineFormatter, setup_logging
from negpath.metrics import REGISTRY, track_lambda_retry, track_round, write_metrics
from negpath.services.scaling import solve_sssp


def _record(msg: str, *args) -> logging.LogRecord:
    return logging.LogRecord("negpath.test", logging.WARNING, __file__, 1, msg, args, None)


def test_json_formatter_emits_one_object():
    line = JsonLineFormatter().format(_record("lambda %s exhausted", 32))
    payload = json.loads(line)
    assert payload["level"] == "WARNING"
    assert payload["logger"] == "negpath.test"
    assert payload["message"] == "lambda 32 exhausted"
    assert "exc" not in payload


def test_json_formatter_includes_tracebacks():
    try:
        raise ValueError("boom")
    except ValueError:
        record = logging.LogRecord(
            "negpath.test", logging.ERROR, __file__, 1, "failed", (), sys.exc_info()
        )
    assert "ValueError: boom" in json.loads(JsonLineFormatter().format(record))["exc"]


def test_setup_logging_picks_formatter(monkeypatch):
    monkeypatch.setenv("NEGPATH_LOG_FORMAT", "json")
    setup_logging("warning")
    root = logging.getLogger()
    assert root.level == logging.WARNING
    assert isinstance(root.handlers[0].formatter, JsonLineFormatter)
    setup_logging("INFO", "plain")
    assert not isinstance(logging.getLogger().handlers[0].formatter, JsonLineFormatter)


def _sample(name: str) -> float:
    return REGISTRY.get_sample_value(name) or 0.0


def test_track_helpers_count_when_enabled():
    before = _sample("negpath_lambda_retries_total")
    track_lambda_retry()
    assert _sample("negpath_lambda_retries_total") == before + 1


def test_track_helpers_are_silent_when_disabled(monkeypatch):
    monkeypatch.setenv("NEGPATH_METRICS", "0")
    before = _sample("negpath_scaling_rounds_total")
    track_round()
    solve_sssp(Graph(2, [(0, 1, -5)]), 0)
    assert _sample("negpath_scaling_rounds_total") == before


def test_solve_records_rounds_and_writes_textfile(tmp_path):
    before = _sample("negpath_scaling_rounds_total")
    # weights up to 5 take three halvings
    solve_sssp(Graph(2, [(0, 1, -5)]), 0)
    assert _sample("negpath_scaling_rounds_total") == before + 3
    out = tmp_path / "negpath.prom"
    write_metrics(out)
    text = out.read_text(encoding="utf-8")
    assert "negpath_scaling_rounds_total" in text
    assert "negpath_solve_seconds" in text
