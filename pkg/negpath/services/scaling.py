from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

from ..graph import Graph, apply_potential, induced_edges, induced_subgraph, reachable_from
from ..metrics import track_round, track_solve
from ..models import (
    INF,
    Dist,
    Engine,
    NegativeCycle,
    NegpathError,
    ShortestPathResult,
    ceil_log2,
)
from .restricted import (
    InvalidRestrictedInstance,
    RestrictedInstance,
    SolverParams,
    SolverTrace,
    ksssp,
)
from .sssp import ContractViolation, bellman_ford, few_neg_sssp

logger = logging.getLogger(__name__)


class NoNegativeCycle(NegpathError):
    """Raised when negative-cycle extraction finds nothing to extract."""


@dataclass(slots=True)
class RoundStats:
    j: int
    phase: int
    n: int
    m: int
    depth: int


@dataclass(slots=True)
class SolveReport:
    engine: str
    distances: Optional[ShortestPathResult] = None
    cycle: Optional[NegativeCycle] = None
    rounds: List[RoundStats] = field(default_factory=list)
    trace: SolverTrace = field(default_factory=SolverTrace)
    wall_ms: float = 0.0

    @property
    def verdict(self) -> str:
        return "negative_cycle" if self.cycle is not None else "distances"

    def to_dict(self, one_indexed: bool = True) -> Dict[str, Any]:
        payload = (
            self.cycle.to_dict(one_indexed)
            if self.cycle is not None
            else self.distances.to_dict(one_indexed)
        )
        payload["rounds"] = [asdict(r) for r in self.rounds]
        return payload


def ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def scale_round_weights(g: Graph, j: int, offset: int = 1) -> Graph:
    """v_j(e) = ceil(w(e) / 2^j) + offset."""
    if j < 0:
        raise ContractViolation(f"scale index must be >= 0, got {j}")
    q = 1 << j
    return g.with_weights([ceil_div(w, q) + offset for w in g.weights])


def extract_negative_cycle(g: Graph, s: int) -> NegativeCycle:
    found = bellman_ford(g, s)
    if isinstance(found, NegativeCycle):
        return found
    raise NoNegativeCycle(f"no negative cycle is reachable from {s}")


def _restricted_potential(
    y: Graph, params: SolverParams, report: SolveReport, j: int, phase: int
) -> List[int]:
    """Distances from a dummy source with 0-edges to every vertex of ``y``."""
    hub = y.n
    edges = list(y.edges())
    edges.extend((hub, v, 0) for v in range(y.n))
    inst = RestrictedInstance.normalize(Graph(y.n + 1, edges), hub)
    trace = SolverTrace()
    found = ksssp(inst, inst.graph.n, params, trace=trace)
    report.rounds.append(
        RoundStats(j=j, phase=phase, n=inst.graph.n, m=inst.graph.m, depth=trace.depth)
    )
    report.trace.levels.extend(trace.levels)
    return [int(d) for d in found.dist[: y.n]]


def _scale(g: Graph, params: SolverParams, report: SolveReport) -> List[int]:
    """Potential phi with w_phi >= -1 everywhere, unless a negative cycle interferes."""
    top = ceil_log2(max(g.max_abs_weight, 1))
    offset = params.scale_offset
    phi = [0] * g.n
    for j in range(top - 1, -1, -1):
        v = scale_round_weights(g, j, offset)
        phi = [2 * x for x in phi]
        y = apply_potential(v, phi)
        low = min(y.weights, default=0)
        if low < -1:
            clamped = y.with_weights([max(-1, w) for w in y.weights])
            delta = _restricted_potential(clamped, params, report, j, 1)
            phi = [a + b for a, b in zip(phi, delta)]
            y = apply_potential(v, phi)
            low = min(y.weights, default=0)
        if low < -1:
            raise InvalidRestrictedInstance(f"round {j} left weight {low} after clamped solve")
        if low < 0:
            delta = _restricted_potential(y, params, report, j, 2)
            phi = [a + b for a, b in zip(phi, delta)]
        if params.check_invariants and min(apply_potential(v, phi).weights, default=0) < 0:
            raise ContractViolation(f"scaled weights not nonnegative after round {j}")
        track_round()
        logger.debug("scaling round j=%s done", j)
    return phi


def _finish(g: Graph, s: int, phi: List[int]) -> ShortestPathResult:
    reduced = few_neg_sssp(apply_potential(g, phi), s, g.n)
    dist: List[Dist] = [
        d if d == INF else d - phi[s] + phi[v] for v, d in enumerate(reduced.dist)
    ]
    return ShortestPathResult(source=s, dist=dist, parent=reduced.parent)


def _consistent(g: Graph, r: ShortestPathResult) -> bool:
    dist = r.dist
    for u, v, w in g.edges():
        du = dist[u]
        if du != INF and dist[v] > du + w:
            return False
    return True


def solve_sssp(g: Graph, s: int, params: Optional[SolverParams] = None) -> SolveReport:
    """Distances from ``s`` or a verified negative cycle reachable from ``s``."""
    started = time.perf_counter()
    params = params or SolverParams.from_settings()
    report = SolveReport(engine=Engine.SCALING.value)

    reach = reachable_from(g, s)
    sub, mapping = induced_subgraph(g, reach)
    edge_map = induced_edges(g, reach)
    local_s = mapping[s]

    result: Optional[ShortestPathResult] = None
    failure: Optional[NegpathError] = None
    try:
        phi = _scale(sub, params, report)
        result = _finish(sub, local_s, phi)
    except (ContractViolation, InvalidRestrictedInstance) as exc:
        logger.info("scaling aborted (%s); checking for a negative cycle", exc)
        failure = exc

    if result is None or not _consistent(sub, result):
        try:
            cycle = extract_negative_cycle(sub, local_s)
        except NoNegativeCycle:
            if failure is not None:
                raise failure from None
            raise
        report.cycle = NegativeCycle(
            vertices=tuple(reach[v] for v in cycle.vertices),
            edges=tuple(edge_map[e] for e in cycle.edges),
            weight=cycle.weight,
        )
    else:
        dist: List[Dist] = [INF] * g.n
        parent: List[Optional[int]] = [None] * g.n
        for old, new in mapping.items():
            dist[old] = result.dist[new]
            e = result.parent[new]
            parent[old] = None if e is None else edge_map[e]
        report.distances = ShortestPathResult(source=s, dist=dist, parent=parent)

    report.wall_ms = (time.perf_counter() - started) * 1000
    track_solve(report.engine, report.wall_ms / 1000)
    logger.info(
        "solve n=%s m=%s verdict=%s restricted_calls=%s wall_ms=%.1f",
        g.n, g.m, report.verdict, len(report.rounds), report.wall_ms,
    )
    return report


def solve(
    g: Graph,
    s: int,
    engine: Engine = Engine.SCALING,
    params: Optional[SolverParams] = None,
    *,
    mark_unbounded: bool = False,
) -> SolveReport:
    engine = Engine(engine)
    if engine is Engine.SCALING:
        return solve_sssp(g, s, params)
    started = time.perf_counter()
    report = SolveReport(engine=engine.value)
    found = bellman_ford(g, s, mark_unbounded=mark_unbounded)
    if isinstance(found, NegativeCycle):
        report.cycle = found
    else:
        report.distances = found
    report.wall_ms = (time.perf_counter() - started) * 1000
    track_solve(report.engine, report.wall_ms / 1000)
    return report
