from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

from pydantic import BaseModel, ValidationError

from . import texts
from .config import load_settings
from .generators import cycle_graph, random_graph, restricted_instance
from .graph import Graph, dump_dimacs, load_dimacs, truncate_nonneg
from .logs import setup_logging
from .metrics import write_metrics
from .models import Engine, NegpathError, Preset, ShortestPathResult, VerifyReport, parse_dist
from .projection import Projection
from .services.barrier import gen_barrier
from .services.path_cover import (
    PathCoverParams,
    ball_steps_bound_holds,
    degree_budget_holds,
    path_cover,
)
from .services.restricted import RestrictedInstance, SolverParams, SolverTrace, ksssp
from .services.scaling import SolveReport, solve
from .validators import (
    EXHAUSTIVE,
    SAMPLED,
    CensusBudgetExceeded,
    verify_clustered,
    verify_path_covering,
    verify_projection,
    verify_sssp,
)

logger = logging.getLogger(__name__)


class ExitCode(IntEnum):
    OK = 0
    NEGATIVE_CYCLE = 1
    VERIFY_FAILED = 2
    INPUT_ERROR = 3


@dataclass(slots=True)
class RunConfig:
    command: str
    graph: Optional[Path] = None
    output: Optional[Path] = None
    source: int = 1
    d: int = 0
    k: Optional[int] = None
    lam: Optional[int] = None
    preset: Optional[str] = None
    engine: str = Engine.SCALING.value
    verify: bool = False
    json: bool = False
    seed: int = 0
    budget: Optional[int] = None
    jobs: int = 1
    truncate: bool = False
    mode: str = EXHAUSTIVE
    debug: bool = False
    metrics_file: Optional[Path] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        known = set(cls.__dataclass_fields__) - {"extra", "command"}
        values = {k: v for k, v in vars(args).items() if k in known and v is not None}
        extra = {k: v for k, v in vars(args).items() if k not in known and k != "command"}
        return cls(command=args.command, extra=extra, **values)

    @property
    def source_index(self) -> int:
        return self.source - 1


class DistanceDocument(BaseModel):
    source: int
    dist: List[Union[int, str]]
    parent: List[Optional[int]]


def _emit(payload: Any, plain: Optional[str] = None, as_json: bool = True) -> None:
    if as_json or plain is None:
        sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")
    else:
        sys.stdout.write(plain)


def _write(path: Optional[Path], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8")


def _read_graph(path: Path) -> Graph:
    with path.open("rb") as stream:
        return load_dimacs(stream)


def _solver_params(cfg: RunConfig) -> SolverParams:
    return SolverParams.from_settings(
        preset=Preset(cfg.preset) if cfg.preset else None,
        lam=cfg.lam,
    )


def cmd_solve(cfg: RunConfig) -> int:
    g = _read_graph(cfg.graph)
    s = cfg.source_index
    if not 0 <= s < g.n:
        raise NegpathError(f"source {cfg.source} outside 1..{g.n}")
    params = _solver_params(cfg)
    if cfg.k is not None:
        trace = SolverTrace()
        result = ksssp(RestrictedInstance.normalize(g, s), cfg.k, params, trace=trace)
        report = SolveReport(engine="ksssp", distances=result, trace=trace)
    else:
        report = solve(g, s, Engine(cfg.engine), params)

    if report.cycle is not None:
        cycle = report.cycle
        plain = texts.CYCLE_TEMPLATE.format(
            weight=cycle.weight, vertices=" ".join(str(v + 1) for v in cycle.vertices)
        )
        _emit(report.to_dict(), plain + "\n", cfg.json)
        return ExitCode.NEGATIVE_CYCLE

    result = report.distances
    if cfg.verify:
        check = verify_sssp(g, s, result)
        if not check.ok:
            _emit(check.to_dict())
            logger.error(texts.VERIFY_FAILED_TEMPLATE.format(checks=check.counterexample))
            return ExitCode.VERIFY_FAILED
    lines = "".join(
        f"d {v + 1} {value}\n" for v, value in enumerate(result.to_dict()["dist"])
    )
    _emit(report.to_dict(), lines, cfg.json)
    return ExitCode.OK


def _covering_report(base: Graph, p: Projection, cfg: RunConfig) -> VerifyReport:
    if cfg.mode == SAMPLED:
        return verify_path_covering(base, p, cfg.d, mode=SAMPLED, seed=cfg.seed)
    try:
        return verify_path_covering(base, p, cfg.d, mode=EXHAUSTIVE, budget=cfg.budget)
    except CensusBudgetExceeded as exc:
        logger.warning(texts.BUDGET_FALLBACK_MESSAGE.format(reason=exc))
        return verify_path_covering(base, p, cfg.d, mode=SAMPLED, seed=cfg.seed)


def cmd_pathcover(cfg: RunConfig) -> int:
    g = _read_graph(cfg.graph)
    if g.has_negative_edge():
        if not cfg.truncate:
            raise NegpathError(texts.NEGATIVE_WEIGHTS_MESSAGE)
        g = truncate_nonneg(g)
    preset = Preset(cfg.preset or load_settings().preset)
    params = PathCoverParams.for_graph(g, cfg.d, cfg.lam, preset)
    projection, stats = path_cover(g, params)
    summary: Dict[str, Any] = {
        "params": {"d": params.d, "lambda": params.lam, "preset": params.preset.value},
        "stats": stats.to_dict(),
        "degree_budget": degree_budget_holds(stats, params.lam),
        "ball_steps_bound": ball_steps_bound_holds(stats, params.lam),
        "slack_bound": params.lam * params.d,
    }
    if cfg.output is not None:
        cfg.output.write_text(projection.to_json() + "\n", encoding="utf-8")
    else:
        summary["projection"] = projection.to_dict()

    code = ExitCode.OK
    if cfg.verify:
        checks = [
            verify_projection(projection, g),
            verify_clustered(projection.carrier, stats.diameter_bound),
            _covering_report(g, projection, cfg),
        ]
        summary["verify"] = [r.to_dict() for r in checks]
        failed = [r.check for r in checks if not r.ok]
        if failed:
            logger.error(texts.VERIFY_FAILED_TEMPLATE.format(checks=", ".join(failed)))
            code = ExitCode.VERIFY_FAILED
    _emit(summary)
    return code


def _distances_from(doc: DistanceDocument) -> ShortestPathResult:
    return ShortestPathResult(
        source=doc.source - 1,
        dist=[parse_dist(x) for x in doc.dist],
        parent=[None if e is None else e - 1 for e in doc.parent],
    )


def cmd_verify(cfg: RunConfig) -> int:
    g = _read_graph(cfg.graph)
    tasks: List[Callable[[], VerifyReport]] = []
    projection_path = cfg.extra.get("projection")
    distances_path = cfg.extra.get("distances")
    if projection_path is not None:
        p = Projection.from_json(Path(projection_path).read_text(encoding="utf-8"))
        bound = cfg.extra.get("bound")
        tasks.append(lambda: verify_projection(p, g))
        if bound is not None:
            tasks.append(lambda: verify_clustered(p.carrier, bound))
        tasks.append(lambda: _covering_report(truncate_nonneg(g), p, cfg))
    else:
        doc = DistanceDocument.model_validate_json(Path(distances_path).read_text(encoding="utf-8"))
        result = _distances_from(doc)
        tasks.append(lambda: verify_sssp(g, result.source, result))

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            reports = list(pool.map(lambda task: task(), tasks))
    else:
        reports = [task() for task in tasks]
    _emit([r.to_dict() for r in reports])
    return ExitCode.OK if all(r.ok for r in reports) else ExitCode.VERIFY_FAILED


def cmd_gen(cfg: RunConfig) -> int:
    kind = cfg.extra["kind"]
    opts = cfg.extra
    comments: List[str] = []
    meta: Optional[Dict[str, Any]] = None
    if kind == "random":
        g = random_graph(opts["n"], opts["m"], opts["wmin"], opts["wmax"], cfg.seed)
        comments.append(f"random n={opts['n']} m={opts['m']} seed={cfg.seed}")
    elif kind == "restricted":
        inst = restricted_instance(opts["n"], opts["m"], cfg.seed)
        g = inst.graph
        comments.append(f"restricted source={inst.source + 1} rejections={inst.rejections}")
    elif kind == "cycle":
        g = cycle_graph(opts["n"], opts["weight"])
    else:
        b = gen_barrier(
            opts["m"], cfg.lam or 1, L=opts.get("L"), R=opts.get("R"), M=opts.get("M"), d=cfg.d or None
        )
        g = b.graph
        meta = b.metadata()
        comments.append("barrier " + json.dumps(meta, sort_keys=True))
    _write(cfg.output, dump_dimacs(g, comments))
    if meta is not None and cfg.output is not None:
        Path(f"{cfg.output}.json").write_text(json.dumps(meta, sort_keys=True) + "\n", encoding="utf-8")
    return ExitCode.OK


def bench_one(path: str, engine: str, preset: Optional[str], lam: Optional[int]) -> Dict[str, Any]:
    g = _read_graph(Path(path))
    params = SolverParams.from_settings(preset=Preset(preset) if preset else None, lam=lam)
    started = time.perf_counter()
    report = solve(g, 0, Engine(engine), params)
    wall_ms = (time.perf_counter() - started) * 1000
    case1, case2 = report.trace.case_counts
    return {
        "file": Path(path).name,
        "engine": engine,
        "n": g.n,
        "m": g.m,
        "W": g.max_abs_weight,
        "verdict": report.verdict,
        "depth": report.trace.depth,
        "restricted_calls": len(report.rounds),
        "growth": [round(x, 6) for x in report.trace.growth_factors],
        "case1": case1,
        "case2": case2,
        "timing": {"wall_ms": round(wall_ms, 3)},
    }


def cmd_bench(cfg: RunConfig) -> int:
    corpus = cfg.graph
    if corpus is None or not corpus.is_dir():
        raise NegpathError(f"corpus directory {corpus} is not readable")
    files = sorted(str(p) for p in corpus.glob("*.gr"))
    engines = [Engine.SCALING.value, Engine.BF.value] if cfg.engine == "both" else [cfg.engine]
    jobs = [(f, e) for f in files for e in engines]
    if cfg.jobs > 1 and jobs:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = [pool.submit(bench_one, f, e, cfg.preset, cfg.lam) for f, e in jobs]
            rows = [fut.result() for fut in futures]
    else:
        rows = [bench_one(f, e, cfg.preset, cfg.lam) for f, e in jobs]
    _emit(rows)
    if cfg.metrics_file is not None:
        write_metrics(cfg.metrics_file)
    return ExitCode.OK


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "solve": cmd_solve,
    "pathcover": cmd_pathcover,
    "verify": cmd_verify,
    "gen": cmd_gen,
    "bench": cmd_bench,
}


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--preset", choices=[p.value for p in Preset])
    parser.add_argument("--lambda", dest="lam", type=int, help=texts.LAMBDA_HELP)
    parser.add_argument("--debug", action="store_true", help="log at DEBUG and show tracebacks")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="negpath", description=texts.DESCRIPTION, epilog=texts.EXIT_CODES_EPILOG
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve_p = sub.add_parser("solve", help=texts.SOLVE_HELP)
    solve_p.add_argument("graph", type=Path)
    solve_p.add_argument("--source", type=int, default=1, help=texts.SOURCE_HELP)
    solve_p.add_argument("--engine", choices=[e.value for e in Engine], default=Engine.SCALING.value)
    solve_p.add_argument("--k", type=int, help=texts.K_HELP)
    solve_p.add_argument("--verify", action="store_true")
    solve_p.add_argument("--json", action="store_true")
    _common(solve_p)

    cover_p = sub.add_parser("pathcover", help=texts.PATHCOVER_HELP)
    cover_p.add_argument("graph", type=Path)
    cover_p.add_argument("--d", type=int, required=True)
    cover_p.add_argument("--output", type=Path, help="write the projection JSON here")
    cover_p.add_argument("--truncate", action="store_true", help=texts.TRUNCATE_HELP)
    cover_p.add_argument("--verify", action="store_true")
    cover_p.add_argument("--budget", type=int, help=texts.BUDGET_HELP)
    cover_p.add_argument("--seed", type=int, default=0)
    modes = cover_p.add_mutually_exclusive_group()
    modes.add_argument("--exhaustive", dest="mode", action="store_const", const=EXHAUSTIVE)
    modes.add_argument("--sampled", dest="mode", action="store_const", const=SAMPLED)
    _common(cover_p)

    verify_p = sub.add_parser("verify", help=texts.VERIFY_HELP)
    verify_p.add_argument("graph", type=Path)
    target = verify_p.add_mutually_exclusive_group(required=True)
    target.add_argument("--projection", type=Path)
    target.add_argument("--distances", type=Path, help="distance JSON as written by solve --json")
    verify_p.add_argument("--d", type=int, default=0)
    verify_p.add_argument("--bound", type=int, help="clustering bound for the carrier")
    verify_p.add_argument("--budget", type=int, help=texts.BUDGET_HELP)
    verify_p.add_argument("--seed", type=int, default=0)
    verify_p.add_argument("--jobs", type=int, default=1, help=texts.JOBS_HELP)
    vmodes = verify_p.add_mutually_exclusive_group()
    vmodes.add_argument("--exhaustive", dest="mode", action="store_const", const=EXHAUSTIVE)
    vmodes.add_argument("--sampled", dest="mode", action="store_const", const=SAMPLED)
    verify_p.add_argument("--debug", action="store_true")

    gen_p = sub.add_parser("gen", help=texts.GEN_HELP)
    kinds = gen_p.add_subparsers(dest="kind", required=True)
    random_p = kinds.add_parser("random")
    random_p.add_argument("--n", type=int, required=True)
    random_p.add_argument("--m", type=int, required=True)
    random_p.add_argument("--wmin", type=int, default=-5)
    random_p.add_argument("--wmax", type=int, default=20)
    restricted_p = kinds.add_parser("restricted")
    restricted_p.add_argument("--n", type=int, required=True)
    restricted_p.add_argument("--m", type=int, required=True)
    cycle_p = kinds.add_parser("cycle")
    cycle_p.add_argument("--n", type=int, required=True)
    cycle_p.add_argument("--weight", type=int, default=1)
    barrier_p = kinds.add_parser("barrier")
    barrier_p.add_argument("--m", type=int, required=True)
    barrier_p.add_argument("--lambda", dest="lam", type=int, default=1)
    for name in ("L", "R", "M", "d"):
        barrier_p.add_argument(f"--{name}", dest=name, type=int, help=f"override {name}")
    for p in (random_p, restricted_p, cycle_p, barrier_p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", type=Path)
        p.add_argument("--debug", action="store_true")

    bench_p = sub.add_parser("bench", help=texts.BENCH_HELP)
    bench_p.add_argument("graph", type=Path, metavar="corpus")
    bench_p.add_argument("--engine", choices=[e.value for e in Engine] + ["both"], default="both")
    bench_p.add_argument("--jobs", type=int, default=1, help=texts.JOBS_HELP)
    bench_p.add_argument("--metrics-file", dest="metrics_file", type=Path)
    _common(bench_p)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig.from_args(args)
    setup_logging("DEBUG" if cfg.debug else None)
    try:
        return int(COMMANDS[cfg.command](cfg))
    except (NegpathError, OSError, ValidationError) as exc:
        if cfg.debug:
            logger.exception("command %s failed", cfg.command)
        sys.stderr.write(texts.ERROR_TEMPLATE.format(reason=exc) + "\n")
        return ExitCode.INPUT_ERROR
