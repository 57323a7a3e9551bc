from __future__ import annotations

import heapq
import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import AbstractSet, Dict, List, Optional, Sequence, Tuple, Union

from ..graph import Graph, apply_potential
from ..models import INF, NEG_INF, Dist, NegativeCycle, NegpathError, ShortestPathResult

logger = logging.getLogger(__name__)


class ContractViolation(NegpathError):
    """Raised when a routine is called outside its precondition."""


@dataclass(slots=True)
class SccDecomposition:
    comp: List[int]
    components: List[List[int]]

    @property
    def count(self) -> int:
        return len(self.components)

    def same(self, u: int, v: int) -> bool:
        return self.comp[u] == self.comp[v]


@dataclass(slots=True)
class MeanCycle:
    mean: Fraction
    vertices: Tuple[int, ...]
    edges: Tuple[int, ...]


def _run_dijkstra(
    g: Graph,
    dist: List[Dist],
    parent: List[Optional[int]],
    heap: List[Tuple[int, int]],
    *,
    skip_negative: bool = False,
) -> None:
    heads, weights, out_adj = g.heads, g.weights, g.out_adj
    while heap:
        du, u = heapq.heappop(heap)
        if du > dist[u]:
            continue
        for e in out_adj[u]:
            w = weights[e]
            if w < 0:
                if skip_negative:
                    continue
                raise ContractViolation(f"negative weight {w} on edge {e} reached by Dijkstra")
            v = heads[e]
            nd = du + w
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = e
                heapq.heappush(heap, (nd, v))


def dijkstra(g: Graph, s: int) -> ShortestPathResult:
    dist: List[Dist] = [INF] * g.n
    parent: List[Optional[int]] = [None] * g.n
    dist[s] = 0
    _run_dijkstra(g, dist, parent, [(0, s)])
    return ShortestPathResult(source=s, dist=dist, parent=parent)


def dijkstra_within(
    g: Graph, s: int, region: AbstractSet[int], *, reverse: bool = False
) -> Dict[int, int]:
    """Distances from ``s`` inside G[region]; with ``reverse`` the distances are *to* ``s``."""
    adj = g.in_adj if reverse else g.out_adj
    ends = g.tails if reverse else g.heads
    weights = g.weights
    dist: Dict[int, int] = {s: 0}
    done = set()
    heap = [(0, s)]
    while heap:
        du, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for e in adj[u]:
            v = ends[e]
            if v not in region:
                continue
            w = weights[e]
            if w < 0:
                raise ContractViolation(f"negative weight {w} on edge {e} inside region")
            nd = du + w
            if nd < dist.get(v, INF):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def bellman_ford(
    g: Graph, s: int, *, mark_unbounded: bool = False
) -> Union[ShortestPathResult, NegativeCycle]:
    """Textbook Bellman-Ford.

    Returns a verified negative cycle when one is reachable from ``s``; with
    ``mark_unbounded`` it returns distances instead, with -inf on every vertex
    reachable from such a cycle.
    """
    n = g.n
    tails, heads, weights = g.tails, g.heads, g.weights
    dist: List[Dist] = [INF] * n
    parent: List[Optional[int]] = [None] * n
    dist[s] = 0
    last_relaxed = None
    for _ in range(n):
        last_relaxed = None
        for e in range(g.m):
            du = dist[tails[e]]
            if du == INF:
                continue
            v = heads[e]
            nd = du + weights[e]
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = e
                last_relaxed = v
        if last_relaxed is None:
            break
    if last_relaxed is None:
        return ShortestPathResult(source=s, dist=dist, parent=parent)

    if mark_unbounded:
        return _mark_unbounded(g, s, dist, parent)
    return _cycle_from_parents(g, parent, last_relaxed)


def _cycle_from_parents(g: Graph, parent: List[Optional[int]], start: int) -> NegativeCycle:
    x = start
    for _ in range(g.n):
        e = parent[x]
        if e is None:
            raise NegpathError("parent walk left the relaxation forest")
        x = g.tails[e]
    edges: List[int] = []
    y = x
    while True:
        e = parent[y]
        edges.append(e)
        y = g.tails[e]
        if y == x:
            break
    edges.reverse()
    weight = sum(g.weights[e] for e in edges)
    if weight >= 0:
        raise NegpathError(f"extracted cycle has nonnegative weight {weight}")
    vertices = tuple(g.tails[e] for e in edges)
    return NegativeCycle(vertices=vertices, edges=tuple(edges), weight=weight)


def _mark_unbounded(
    g: Graph, s: int, dist: List[Dist], parent: List[Optional[int]]
) -> ShortestPathResult:
    queue = deque()
    unbounded = [False] * g.n
    for e in range(g.m):
        du = dist[g.tails[e]]
        v = g.heads[e]
        if du != INF and du + g.weights[e] < dist[v] and not unbounded[v]:
            unbounded[v] = True
            queue.append(v)
    while queue:
        u = queue.popleft()
        for e in g.out_adj[u]:
            v = g.heads[e]
            if not unbounded[v]:
                unbounded[v] = True
                queue.append(v)
    for v in range(g.n):
        if unbounded[v]:
            dist[v] = NEG_INF
            parent[v] = None
    return ShortestPathResult(source=s, dist=dist, parent=parent)


def scc(g: Graph) -> SccDecomposition:
    """Iterative Tarjan; components come out in topological order of the condensation."""
    n = g.n
    heads, out_adj = g.heads, g.out_adj
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: List[int] = []
    found: List[List[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        work = [(root, 0)]
        while work:
            v, i = work[-1]
            adj = out_adj[v]
            if i < len(adj):
                work[-1] = (v, i + 1)
                w = heads[adj[i]]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            work.pop()
            if work:
                p = work[-1][0]
                if low[v] < low[p]:
                    low[p] = low[v]
            if low[v] == index[v]:
                members = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    members.append(w)
                    if w == v:
                        break
                members.sort()
                found.append(members)
    # Tarjan finishes sinks first
    found.reverse()
    comp = [0] * n
    for cid, members in enumerate(found):
        for v in members:
            comp[v] = cid
    return SccDecomposition(comp=comp, components=found)


def dag_potential_sssp(
    g: Graph, s: int, comp: Optional[Sequence[int]] = None
) -> ShortestPathResult:
    """Exact SSSP when negative edges only run between strongly connected components.

    ``comp`` may carry known SCC labels in topological order of the condensation.
    """
    if comp is None:
        comp = scc(g).comp
    elif len(comp) != g.n:
        raise ContractViolation(f"{len(comp)} component labels for {g.n} vertices")
    shift = 0
    for e, (u, v, w) in enumerate(g.edges()):
        if w < 0:
            if comp[u] == comp[v]:
                raise ContractViolation(
                    f"edge {e} ({u}->{v}, w={w}) is negative inside one strongly connected component"
                )
            shift = max(shift, -w)
    if shift == 0:
        return dijkstra(g, s)
    phi = [-shift * comp[v] for v in range(g.n)]
    reduced = dijkstra(apply_potential(g, phi), s)
    dist: List[Dist] = [
        d if d == INF else d - phi[s] + phi[v] for v, d in enumerate(reduced.dist)
    ]
    return ShortestPathResult(source=s, dist=dist, parent=reduced.parent)


def few_neg_sssp(g: Graph, s: int, k: int) -> ShortestPathResult:
    """SSSP when shortest paths use at most ``k`` negative edges.

    Evaluates the (k+1)-layer construction lazily: each layer relaxes the
    negative edges out of the previous one, then closes under nonnegative
    edges with Dijkstra. Stops as soon as a layer improves nothing.
    """
    if k < 0:
        raise ContractViolation(f"k must be >= 0, got {k}")
    dist: List[Dist] = [INF] * g.n
    parent: List[Optional[int]] = [None] * g.n
    dist[s] = 0
    _run_dijkstra(g, dist, parent, [(0, s)], skip_negative=True)
    negative = [e for e, w in enumerate(g.weights) if w < 0]
    if not negative:
        return ShortestPathResult(source=s, dist=dist, parent=parent)
    tails, heads, weights = g.tails, g.heads, g.weights
    layers = 0
    for _ in range(k):
        snapshot = dist[:]
        heap: List[Tuple[int, int]] = []
        for e in negative:
            du = snapshot[tails[e]]
            if du == INF:
                continue
            v = heads[e]
            nd = du + weights[e]
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = e
                heap.append((nd, v))
        if not heap:
            break
        layers += 1
        heapq.heapify(heap)
        _run_dijkstra(g, dist, parent, heap, skip_negative=True)
    logger.debug("few_neg_sssp n=%s k=%s layers_used=%s", g.n, k, layers)
    return ShortestPathResult(source=s, dist=dist, parent=parent)


def karp_min_mean_cycle(g: Graph) -> Optional[MeanCycle]:
    """Exact minimum cycle mean via Karp's recurrence, one SCC at a time.

    Memory is quadratic in the largest SCC; meant for certification at desk scale.
    Returns None for acyclic graphs.
    """
    dec = scc(g)
    best: Optional[MeanCycle] = None
    for cid, members in enumerate(dec.components):
        internal = [e for v in members for e in g.out_adj[v] if dec.comp[g.heads[e]] == cid]
        if not internal:
            continue
        found = _karp_component(g, members, internal)
        if best is None or found.mean < best.mean:
            best = found
    return best


def _karp_component(g: Graph, members: List[int], internal: List[int]) -> MeanCycle:
    k = len(members)
    local = {v: i for i, v in enumerate(members)}
    arcs = [(local[g.tails[e]], local[g.heads[e]], g.weights[e], e) for e in internal]
    table: List[List[Optional[int]]] = [[None] * k for _ in range(k + 1)]
    via: List[List[Optional[int]]] = [[None] * k for _ in range(k + 1)]
    table[0][0] = 0
    for i in range(1, k + 1):
        prev, row, row_via = table[i - 1], table[i], via[i]
        for a, b, w, e in arcs:
            da = prev[a]
            if da is None:
                continue
            cand = da + w
            if row[b] is None or cand < row[b]:
                row[b] = cand
                row_via[b] = e
    mu: Optional[Fraction] = None
    arg = -1
    for v in range(k):
        dk = table[k][v]
        if dk is None:
            continue
        worst = max(
            Fraction(dk - table[i][v], k - i) for i in range(k) if table[i][v] is not None
        )
        if mu is None or worst < mu:
            mu, arg = worst, v

    # walk of k edges ending at arg; every simple cycle peeled from it has mean mu
    walk_edges: List[int] = []
    x = arg
    for i in range(k, 0, -1):
        e = via[i][x]
        walk_edges.append(e)
        x = local[g.tails[e]]
    walk_edges.reverse()
    vertices = [g.tails[walk_edges[0]]] + [g.heads[e] for e in walk_edges]
    position: Dict[int, int] = {}
    for j, v in enumerate(vertices):
        if v in position:
            p = position[v]
            cycle = walk_edges[p:j]
            mean = Fraction(sum(g.weights[e] for e in cycle), len(cycle))
            if mean != mu:
                raise NegpathError(f"cycle witness mean {mean} differs from {mu}")
            return MeanCycle(
                mean=mu,
                vertices=tuple(g.tails[e] for e in cycle),
                edges=tuple(cycle),
            )
        position[v] = j
    raise NegpathError("no cycle on a walk longer than the component")
