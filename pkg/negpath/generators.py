"""Seeded graph generators. The same arguments always produce the same graph."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import List, Tuple

from .graph import Edge, Graph
from .models import NegpathError
from .validators import verify_restricted

logger = logging.getLogger(__name__)


class GeneratorError(NegpathError):
    """Raised when generator parameters cannot produce a graph."""


@dataclass(slots=True)
class GeneratedInstance:
    graph: Graph
    source: int
    rejections: int = 0


def random_graph(n: int, m: int, wmin: int, wmax: int, seed: int = 0) -> Graph:
    """Uniform random digraph without self-loops; parallel edges allowed."""
    if n < 1 or m < 0 or wmin > wmax:
        raise GeneratorError(f"bad random graph parameters n={n} m={m} w=[{wmin}, {wmax}]")
    if n == 1 and m > 0:
        raise GeneratorError("a single vertex has no room for loop-free edges")
    rng = random.Random(seed)
    edges: List[Edge] = []
    for _ in range(m):
        u = rng.randrange(n)
        v = rng.randrange(n - 1)
        if v >= u:
            v += 1
        edges.append((u, v, rng.randint(wmin, wmax)))
    return Graph(n, edges)


def cycle_graph(n: int, weight: int = 1) -> Graph:
    if n < 1:
        raise GeneratorError(f"cycle needs n >= 1, got {n}")
    return Graph(n, [(i, (i + 1) % n, weight) for i in range(n)])


def _hidden_potential_edges(rng: random.Random, n: int, m: int) -> List[Edge]:
    # weights w0 + phi(u) - phi(v) with w0 >= 1 keep every cycle mean >= 1
    phi = [0] + [rng.randint(0, max(1, n // 4)) for _ in range(n - 1)]
    edges: List[Edge] = [(0, v, 0) for v in range(1, n)]
    if n < 3:
        return edges
    attempts = 0
    while len(edges) < n - 1 + m and attempts < 20 * (m + 1):
        attempts += 1
        u = rng.randrange(1, n)
        v = rng.randrange(1, n - 1)
        if v >= u:
            v += 1
        shift = phi[u] - phi[v]
        low = max(1, -1 - shift)
        high = n - shift
        if low > high:
            continue
        edges.append((u, v, rng.randint(low, high) + shift))
    return edges


def restricted_instance(n: int, m: int, seed: int = 0, max_tries: int = 100) -> GeneratedInstance:
    """Restricted instance with source 0; samples failing the restricted check are redrawn."""
    if n < 1 or m < 0:
        raise GeneratorError(f"bad restricted instance parameters n={n} m={m}")
    rng = random.Random(seed)
    for tries in range(max_tries):
        g = Graph(n, _hidden_potential_edges(rng, n, m))
        report = verify_restricted(g, 0)
        if report.ok:
            if tries:
                logger.info("restricted instance accepted after %s rejections", tries)
            return GeneratedInstance(graph=g, source=0, rejections=tries)
        logger.debug("rejected restricted sample: %s", report.counterexample)
    raise GeneratorError(f"no restricted instance after {max_tries} samples")


def dag_chain(blocks: int, block_size: int, seed: int = 0, bridge_weight: int = -3) -> GeneratedInstance:
    """Strongly connected blocks in a row, joined by negative bridges; no negative cycle."""
    if blocks < 1 or block_size < 1:
        raise GeneratorError(f"bad chain parameters blocks={blocks} size={block_size}")
    rng = random.Random(seed)
    edges: List[Edge] = []
    for b in range(blocks):
        base = b * block_size
        for i in range(block_size):
            if block_size > 1:
                edges.append((base + i, base + (i + 1) % block_size, rng.randint(0, 5)))
        for _ in range(block_size):
            u, v = rng.randrange(block_size), rng.randrange(block_size)
            if u != v:
                edges.append((base + u, base + v, rng.randint(0, 5)))
        if b + 1 < blocks:
            nxt = base + block_size
            edges.append((base + rng.randrange(block_size), nxt + rng.randrange(block_size), bridge_weight))
    return GeneratedInstance(graph=Graph(blocks * block_size, edges), source=0)


def planted_negative_cycle(n: int, m: int, length: int, seed: int = 0) -> Tuple[Graph, List[int]]:
    """Nonnegative random graph plus a cycle of weight -1 through vertex 0."""
    if not 1 <= length <= n:
        raise GeneratorError(f"cycle length {length} outside 1..{n}")
    rng = random.Random(seed)
    g = random_graph(n, m, 0, 10, seed) if n > 1 else Graph(n)
    ring = [0] + rng.sample(range(1, n), length - 1)
    edges = list(g.edges())
    for i, u in enumerate(ring):
        edges.append((u, ring[(i + 1) % length], -1 if i == length - 1 else 0))
    return Graph(n, edges), ring
