from __future__ import annotations

import logging
import random
from typing import Dict, List, Optional, Sequence, Set

from .config import load_settings
from .graph import Graph
from .models import INF, NEG_INF, NegpathError, ShortestPathResult, VerifyReport, format_dist
from .projection import Projection
from .services.sssp import dijkstra, dijkstra_within, karp_min_mean_cycle, scc

logger = logging.getLogger(__name__)

EXHAUSTIVE = "exhaustive"
SAMPLED = "sampled"


class CensusBudgetExceeded(NegpathError):
    """Raised when exhaustive enumeration would exceed its budget."""


def _fail(check: str, counterexample: Dict, **measures) -> VerifyReport:
    return VerifyReport(check=check, ok=False, counterexample=counterexample, measures=measures)


def verify_projection(p: Projection, base: Graph) -> VerifyReport:
    check = "projection"
    if p.base_n != base.n:
        return _fail(check, {"reason": "base_n", "expected": base.n, "found": p.base_n})
    for x, v in enumerate(p.pi):
        if not 0 <= v < base.n:
            return _fail(check, {"reason": "pi_range", "node": x, "pi": v})

    weights_by_pair: Optional[Dict[tuple, Set[int]]] = None
    c = p.carrier
    for index, (x, y, w) in enumerate(c.edges()):
        a, b = p.pi[x], p.pi[y]
        o = p.origin[index]
        if o is not None:
            ok = 0 <= o < base.m and base.edge(o) == (a, b, w)
        else:
            if weights_by_pair is None:
                weights_by_pair = {}
                for u, v, bw in base.edges():
                    weights_by_pair.setdefault((u, v), set()).add(bw)
            ok = w in weights_by_pair.get((a, b), ())
        if not ok:
            return _fail(check, {"reason": "edge", "edge": index, "pair": [a, b], "weight": w})

    present = p.present
    for v in sorted(present):
        x = p.rep.get(v)
        if x is None or not 0 <= x < c.n or p.pi[x] != v:
            return _fail(check, {"reason": "rep", "vertex": v, "rep": x})
    for v in sorted(p.rep):
        if v not in present:
            return _fail(check, {"reason": "rep_absent", "vertex": v, "rep": p.rep[v]})
    return VerifyReport(
        check=check, ok=True, measures={"carrier_n": c.n, "carrier_m": c.m, "present": len(present)}
    )


def verify_clustered(
    g: Graph,
    bound: int,
    *,
    weak: bool = False,
    projection: Optional[Projection] = None,
    base: Optional[Graph] = None,
) -> VerifyReport:
    """Every SCC of ``g`` has diameter <= bound, measured inside the SCC.

    With ``weak`` the distances are taken in ``base`` between pi-images, where
    ``g`` is the carrier of ``projection``.
    """
    check = "clustered_weak" if weak else "clustered"
    if weak and (projection is None or base is None):
        raise ValueError("weak diameter needs the projection and its base graph")
    dec = scc(g)
    worst = 0
    nontrivial = 0
    for cid, members in enumerate(dec.components):
        if len(members) == 1:
            continue
        nontrivial += 1
        region = set(members)
        for x in members:
            if weak:
                far = dijkstra(base, projection.pi[x]).dist
                pairs = ((y, far[projection.pi[y]]) for y in members)
            else:
                inside = dijkstra_within(g, x, region)
                pairs = ((y, inside.get(y, INF)) for y in members)
            for y, dist in pairs:
                if dist > worst:
                    worst = dist
                if dist > bound:
                    return _fail(
                        check,
                        {"component": cid, "source": x, "target": y, "distance": dist, "bound": bound},
                        max_diameter=worst,
                        sccs=nontrivial,
                    )
    return VerifyReport(check=check, ok=True, measures={"max_diameter": worst, "sccs": nontrivial})


class _Lifter:
    def __init__(self, p: Projection, require_rep_start: bool) -> None:
        c = p.carrier
        self.succ: List[Dict[int, List[int]]] = [{} for _ in range(c.n)]
        for x, y in zip(c.tails, c.heads):
            self.succ[x].setdefault(p.pi[y], []).append(y)
        self.starts: Dict[int, List[int]] = {}
        if require_rep_start:
            for v, x in p.rep.items():
                self.starts[v] = [x]
        else:
            for x, v in enumerate(p.pi):
                self.starts.setdefault(v, []).append(x)

    def start(self, v: int) -> frozenset:
        return frozenset(self.starts.get(v, ()))

    def advance(self, current: frozenset, v: int) -> frozenset:
        succ = self.succ
        return frozenset(y for x in current for y in succ[x].get(v, ()))


def verify_path_covering(
    base: Graph,
    p: Projection,
    d: int,
    *,
    mode: str = EXHAUSTIVE,
    require_rep_start: bool = True,
    budget: Optional[int] = None,
    samples: int = 2000,
    seed: int = 0,
) -> VerifyReport:
    """Every simple path of truncated weight <= d lifts into the carrier.

    Lifts are tracked as sets of carrier vertices: S_1 holds rep(v_1) (or every
    copy of v_1), S_{t+1} the carrier successors of S_t that map to v_{t+1}.
    """
    check = "path_covering"
    lifter = _Lifter(p, require_rep_start)
    if mode == EXHAUSTIVE:
        budget = budget if budget is not None else load_settings().exhaustive_budget
        return _census(base, d, lifter, budget, check)
    if mode != SAMPLED:
        raise ValueError(f"unknown covering mode {mode!r}")
    return _sampled(base, d, lifter, samples, seed, check)


def _census(base: Graph, d: int, lifter: _Lifter, budget: int, check: str) -> VerifyReport:
    heads, weights, out_adj = base.heads, base.weights, base.out_adj
    count = 0
    for start in range(base.n):
        lift = lifter.start(start)
        count += 1
        if not lift:
            return _fail(check, {"path": [start], "weight": 0}, paths=count)
        path = [start]
        on_path = {start}
        stack = [(iter(out_adj[start]), lift, 0)]
        while stack:
            edges, current, spent = stack[-1]
            e = next(edges, None)
            if e is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            v = heads[e]
            if v in on_path:
                continue
            total = spent + max(0, weights[e])
            if total > d:
                continue
            count += 1
            if count > budget:
                raise CensusBudgetExceeded(f"more than {budget} simple paths of weight <= {d}")
            nxt = lifter.advance(current, v)
            if not nxt:
                return _fail(check, {"path": path + [v], "weight": total}, paths=count)
            path.append(v)
            on_path.add(v)
            stack.append((iter(out_adj[v]), nxt, total))
    return VerifyReport(check=check, ok=True, measures={"paths": count, "mode": EXHAUSTIVE})


def _sampled(
    base: Graph, d: int, lifter: _Lifter, samples: int, seed: int, check: str
) -> VerifyReport:
    count = 0
    for v in range(base.n):
        count += 1
        if not lifter.start(v):
            return _fail(check, {"path": [v], "weight": 0}, paths=count)
    for u, v, w in base.edges():
        if u == v or max(0, w) > d:
            continue
        count += 1
        if not lifter.advance(lifter.start(u), v):
            return _fail(check, {"path": [u, v], "weight": max(0, w)}, paths=count)
    if base.n == 0:
        return VerifyReport(check=check, ok=True, measures={"paths": count, "mode": SAMPLED})
    rng = random.Random(seed)
    for _ in range(samples):
        start = rng.randrange(base.n)
        path = [start]
        on_path = {start}
        current = lifter.start(start)
        spent = 0
        while rng.random() > 0.2:
            options = [
                e
                for e in base.out_adj[path[-1]]
                if base.heads[e] not in on_path and spent + max(0, base.weights[e]) <= d
            ]
            if not options:
                break
            e = rng.choice(options)
            v = base.heads[e]
            spent += max(0, base.weights[e])
            current = lifter.advance(current, v)
            path.append(v)
            on_path.add(v)
            count += 1
            if not current:
                return _fail(check, {"path": path, "weight": spent}, paths=count)
    return VerifyReport(check=check, ok=True, measures={"paths": count, "mode": SAMPLED})


def verify_restricted(g: Graph, s: int) -> VerifyReport:
    check = "restricted"
    if not 0 <= s < g.n:
        return _fail(check, {"bullet": "source", "reason": f"source {s} out of range"})
    for e, w in enumerate(g.weights):
        if not -1 <= w <= g.n:
            return _fail(check, {"bullet": "weights", "edge": e, "weight": w})
    zero_heads = {g.heads[e] for e in g.out_adj[s] if g.weights[e] == 0}
    for v in range(g.n):
        if v != s and v not in zero_heads:
            return _fail(check, {"bullet": "source", "vertex": v})
    cycle = karp_min_mean_cycle(g)
    if cycle is not None and cycle.mean < 1:
        return _fail(
            check,
            {"bullet": "cycle_mean", "mean": str(cycle.mean), "cycle": list(cycle.vertices)},
            min_mean=str(cycle.mean),
        )
    return VerifyReport(
        check=check, ok=True, measures={"min_mean": "acyclic" if cycle is None else str(cycle.mean)}
    )


def verify_sssp(g: Graph, s: int, r: ShortestPathResult) -> VerifyReport:
    check = "sssp"
    dist, parent = r.dist, r.parent
    if len(dist) != g.n or len(parent) != g.n:
        return _fail(check, {"reason": "length", "expected": g.n, "found": len(dist)})
    if dist[s] != 0:
        return _fail(check, {"reason": "source", "vertex": s, "dist": format_dist(dist[s])})

    for e, (u, v, w) in enumerate(g.edges()):
        du, dv = dist[u], dist[v]
        if du == NEG_INF:
            if dv != NEG_INF:
                return _fail(check, {"reason": "unbounded_edge", "edge": e})
            continue
        if du == INF:
            continue
        if dv > du + w:
            return _fail(check, {"reason": "edge", "edge": e, "tail": u, "head": v})

    for v in range(g.n):
        e = parent[v]
        finite = dist[v] not in (INF, NEG_INF)
        if e is None:
            if finite and v != s:
                return _fail(check, {"reason": "missing_parent", "vertex": v})
            continue
        if not finite:
            return _fail(check, {"reason": "parent_on_infinite", "vertex": v, "edge": e})
        if not 0 <= e < g.m or g.heads[e] != v:
            return _fail(check, {"reason": "parent_head", "vertex": v, "edge": e})
        du = dist[g.tails[e]]
        if du in (INF, NEG_INF) or du + g.weights[e] != dist[v]:
            return _fail(check, {"reason": "not_tight", "vertex": v, "edge": e})

    rooted = [False] * g.n
    rooted[s] = True
    for v in range(g.n):
        if rooted[v] or dist[v] in (INF, NEG_INF):
            continue
        walk: List[int] = []
        seen: Set[int] = set()
        x = v
        while not rooted[x]:
            if x in seen:
                return _fail(check, {"reason": "parent_cycle", "vertex": x})
            seen.add(x)
            walk.append(x)
            x = g.tails[parent[x]]
        for y in walk:
            rooted[y] = True
    return VerifyReport(check=check, ok=True, measures={"reachable": sum(rooted)})


def run_checks(reports: Sequence[VerifyReport]) -> bool:
    failed = [r.check for r in reports if not r.ok]
    if failed:
        logger.warning("verification failed: %s", ", ".join(failed))
    return not failed
