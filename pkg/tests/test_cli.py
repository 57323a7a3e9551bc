from __future__ import annotations

import json

import pytest

from negpath.cli import ExitCode, RunConfig, build_parser, main
from negpath.graph import Graph, dump_dimacs, load_dimacs
from negpath.validators import verify_restricted

from .conftest import LINKED_PAIRS_EDGES

NEGATIVE_EDGE = "p sp 2 1\na 1 2 -5\n"
NEGATIVE_CYCLE = "p sp 3 3\na 1 2 0\na 2 3 1\na 3 2 -2\n"


@pytest.fixture
def write_graph(tmp_path):
    def _write(text: str, name: str = "g.gr"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return _write


def test_solve_prints_distance_lines(write_graph, capsys):
    assert main(["solve", write_graph(NEGATIVE_EDGE)]) == ExitCode.OK
    assert capsys.readouterr().out == "d 1 0\nd 2 -5\n"


def test_solve_json_and_engines_agree(write_graph, capsys):
    path = write_graph(NEGATIVE_EDGE)
    assert main(["solve", path, "--json"]) == 0
    scaled = json.loads(capsys.readouterr().out)
    assert main(["solve", path, "--json", "--engine", "bf"]) == 0
    plain = json.loads(capsys.readouterr().out)
    assert scaled["verdict"] == plain["verdict"] == "distances"
    assert scaled["dist"] == plain["dist"] == [0, -5]


def test_solve_reports_negative_cycle(write_graph, capsys):
    assert main(["solve", write_graph(NEGATIVE_CYCLE)]) == ExitCode.NEGATIVE_CYCLE
    assert capsys.readouterr().out.startswith("negative cycle of weight -1:")


def test_solve_unreachable_vertex_prints_inf(write_graph, capsys):
    assert main(["solve", write_graph("p sp 3 1\na 1 2 4\n"), "--verify"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "d 3 inf"


def test_solve_restricted_instance_with_k(write_graph, capsys):
    path = write_graph("p sp 3 3\na 1 2 0\na 1 3 0\na 2 3 -1\n")
    assert main(["solve", path, "--k", "2"]) == 0
    assert capsys.readouterr().out.splitlines() == ["d 1 0", "d 2 0", "d 3 -1"]


@pytest.mark.parametrize(
    "text, extra",
    [
        ("p sp 2 1\na 1 3 5\n", []),
        (NEGATIVE_EDGE, ["--source", "5"]),
        ("p sp 2 1\na 1 2 1\n", ["--k", "1"]),
    ],
)
def test_solve_input_errors(write_graph, capsys, text, extra):
    assert main(["solve", write_graph(text), *extra]) == ExitCode.INPUT_ERROR
    assert capsys.readouterr().err.startswith("negpath: error:")


def test_missing_file_is_an_input_error(tmp_path, capsys):
    assert main(["solve", str(tmp_path / "absent.gr")]) == ExitCode.INPUT_ERROR


def test_undecodable_bytes_are_an_input_error(tmp_path, capsys):
    path = tmp_path / "bad.gr"
    path.write_bytes(b"p sp 2 1\na 1 2 -5\nc \xff\xfe\n")
    assert main(["solve", str(path)]) == ExitCode.INPUT_ERROR
    assert "negpath: error: line 3:" in capsys.readouterr().err


def test_pathcover_summary_and_verify(write_graph, capsys):
    path = write_graph(dump_dimacs(Graph(4, LINKED_PAIRS_EDGES)))
    assert main(["pathcover", path, "--d", "3", "--verify"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["params"]["d"] == 3
    assert summary["stats"]["base_m"] == 6
    assert summary["slack_bound"] == 3 * summary["params"]["lambda"]
    assert [r["ok"] for r in summary["verify"]] == [True, True, True]
    assert summary["projection"]["base_n"] == 4


def test_pathcover_needs_truncate_for_negative_weights(write_graph, capsys):
    path = write_graph(NEGATIVE_EDGE)
    assert main(["pathcover", path, "--d", "1"]) == ExitCode.INPUT_ERROR
    capsys.readouterr()
    assert main(["pathcover", path, "--d", "1", "--truncate"]) == 0


def test_projection_round_trip_through_verify(write_graph, tmp_path, capsys):
    path = write_graph(dump_dimacs(Graph(4, LINKED_PAIRS_EDGES)))
    out = tmp_path / "cover.json"
    assert main(["pathcover", path, "--d", "2", "--output", str(out)]) == 0
    assert "projection" not in json.loads(capsys.readouterr().out)
    assert main(["verify", path, "--projection", str(out), "--d", "2", "--jobs", "2"]) == 0
    reports = json.loads(capsys.readouterr().out)
    assert [r["check"] for r in reports] == ["projection", "path_covering"]


def test_verify_distances(write_graph, tmp_path, capsys):
    path = write_graph(NEGATIVE_EDGE)
    assert main(["solve", path, "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    good = tmp_path / "good.json"
    good.write_text(json.dumps(doc), encoding="utf-8")
    assert main(["verify", path, "--distances", str(good)]) == 0
    capsys.readouterr()

    doc["dist"] = [0, -4]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc), encoding="utf-8")
    assert main(["verify", path, "--distances", str(bad)]) == ExitCode.VERIFY_FAILED
    (report,) = json.loads(capsys.readouterr().out)
    assert report["counterexample"]["reason"] == "edge"


def test_gen_barrier_writes_metadata(tmp_path):
    out = tmp_path / "barrier.gr"
    assert main(["gen", "barrier", "--m", "480", "--output", str(out)]) == 0
    text = out.read_text(encoding="utf-8")
    assert text.startswith("c barrier ")
    assert load_dimacs(text).m == 8215
    meta = json.loads((tmp_path / "barrier.gr.json").read_text(encoding="utf-8"))
    assert (meta["L"], meta["d"], meta["R"], meta["M"]) == (21, 65, 130, 24)


def test_gen_barrier_overrides(capsys):
    assert main(["gen", "barrier", "--m", "0", "--L", "1", "--R", "4", "--M", "2"]) == 0
    g = load_dimacs(capsys.readouterr().out)
    assert g.m == 15


def test_gen_random_is_seeded(capsys):
    args = ["gen", "random", "--n", "20", "--m", "50", "--seed", "7"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first
    assert main(args[:-1] + ["8"]) == 0
    assert capsys.readouterr().out != first


def test_gen_cycle_and_restricted(capsys):
    assert main(["gen", "cycle", "--n", "5"]) == 0
    assert load_dimacs(capsys.readouterr().out) == Graph(5, [(i, (i + 1) % 5, 1) for i in range(5)])
    assert main(["gen", "restricted", "--n", "10", "--m", "20", "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("c restricted source=1 rejections=")
    assert verify_restricted(load_dimacs(out), 0).ok


def test_bench_on_empty_corpus(tmp_path, capsys):
    assert main(["bench", str(tmp_path)]) == 0
    assert capsys.readouterr().out == "[]\n"


def test_bench_rows(tmp_path, capsys):
    (tmp_path / "one.gr").write_text(NEGATIVE_EDGE, encoding="utf-8")
    metrics = tmp_path / "metrics.prom"
    assert main(["bench", str(tmp_path), "--metrics-file", str(metrics)]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert [(r["file"], r["engine"]) for r in rows] == [("one.gr", "scaling"), ("one.gr", "bf")]
    assert {r["verdict"] for r in rows} == {"distances"}
    assert rows[0]["W"] == 5
    assert "negpath_solve_seconds" in metrics.read_text(encoding="utf-8")


def test_bench_needs_a_directory(tmp_path):
    assert main(["bench", str(tmp_path / "missing")]) == ExitCode.INPUT_ERROR


def test_run_config_collects_subcommand_extras():
    args = build_parser().parse_args(["gen", "barrier", "--m", "10", "--R", "4"])
    cfg = RunConfig.from_args(args)
    assert cfg.command == "gen"
    assert cfg.lam == 1
    assert cfg.extra["kind"] == "barrier"
    assert cfg.extra["R"] == 4
    assert cfg.source_index == 0
