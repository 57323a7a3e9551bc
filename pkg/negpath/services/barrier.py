"""Ladder-and-star gadget on which every clustered path cover must be large.

Vertex numbering: spine a_0..a_L, then the layer cycles row by row, then the
star center, then the star leaves. Edge numbering: per layer R cycle edges,
R entry edges and R exit edges; then the center -> a_0 bridge; then the star.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
from pydantic import BaseModel

from .. import validators
from ..config import load_settings
from ..graph import Graph
from ..models import NegpathError

logger = logging.getLogger(__name__)


class BarrierParameterError(NegpathError):
    """Raised when gadget parameters are degenerate or a family does not fit the gadget."""


@dataclass(frozen=True, slots=True)
class Snake:
    star: int
    positions: Tuple[int, ...]
    edges: Tuple[int, ...]


@dataclass(slots=True)
class BarrierInstance:
    graph: Graph
    m_target: int
    lam: int
    L: int
    d: int
    R: int
    M: int
    overridden: bool = False

    @property
    def center(self) -> int:
        return self.L + 1 + self.L * self.R

    @property
    def bound(self) -> int:
        return self.d * self.lam

    @property
    def snake_count(self) -> int:
        return self.M * self.R**self.L

    def spine(self, j: int) -> int:
        return j

    def cycle_vertex(self, j: int, r: int) -> int:
        return self.L + 1 + j * self.R + r

    def leaf(self, t: int) -> int:
        return self.center + 1 + t

    def cycle_edge(self, j: int, r: int) -> int:
        return 3 * self.R * j + r

    def entry_edge(self, j: int, r: int) -> int:
        return 3 * self.R * j + self.R + r

    def exit_edge(self, j: int, r: int) -> int:
        return 3 * self.R * j + 2 * self.R + r

    @property
    def bridge_edge(self) -> int:
        return 3 * self.R * self.L

    def star_edge(self, t: int) -> int:
        return self.bridge_edge + 1 + t

    def layer_cycle(self, j: int) -> range:
        start = 3 * self.R * j
        return range(start, start + self.R)

    def snake(self, t: int, positions: Sequence[int]) -> Snake:
        edges = [self.star_edge(t), self.bridge_edge]
        for j, r in enumerate(positions):
            edges.append(self.entry_edge(j, r))
            edges.append(self.cycle_edge(j, r))
            edges.append(self.exit_edge(j, (r + 1) % self.R))
        return Snake(star=t, positions=tuple(positions), edges=tuple(edges))

    def metadata(self) -> Dict[str, Any]:
        return {
            "m_target": self.m_target,
            "lambda": self.lam,
            "L": self.L,
            "d": self.d,
            "R": self.R,
            "M": self.M,
            "n": self.graph.n,
            "m": self.graph.m,
            "overridden": self.overridden,
        }


def gen_barrier(
    m: int,
    lam: int,
    *,
    L: Optional[int] = None,
    R: Optional[int] = None,
    M: Optional[int] = None,
    d: Optional[int] = None,
) -> BarrierInstance:
    if lam < 1:
        raise BarrierParameterError(f"lambda must be >= 1, got {lam}")
    overridden = any(x is not None for x in (L, R, M, d))
    if L is None:
        L = math.isqrt(max(m, 0) // lam)
    if d is None:
        d = 2 + 3 * L
    if R is None:
        R = 2 * d * lam
    if M is None:
        M = m // 20
    if L < 1 or R < 2 or M < 1:
        raise BarrierParameterError(f"degenerate gadget L={L} R={R} M={M} for m={m}, lambda={lam}")
    if not overridden and R <= d * lam:
        raise BarrierParameterError(f"R={R} must exceed d*lambda={d * lam}")

    edges: List[Tuple[int, int, int]] = []
    first_cycle = L + 1
    center = first_cycle + L * R
    for j in range(L):
        row = first_cycle + j * R
        edges.extend((row + r, row + (r + 1) % R, 1) for r in range(R))
        edges.extend((j, row + r, 1) for r in range(R))
        edges.extend((row + r, j + 1, 1) for r in range(R))
    edges.append((center, 0, 1))
    edges.extend((center + 1 + t, center, 1) for t in range(M))
    graph = Graph(center + 1 + M, edges)
    logger.info("barrier m=%s lambda=%s L=%s d=%s R=%s M=%s edges=%s", m, lam, L, d, R, M, graph.m)
    return BarrierInstance(
        graph=graph, m_target=m, lam=lam, L=L, d=d, R=R, M=M, overridden=overridden
    )


def snakes(b: BarrierInstance) -> Tuple[int, Iterator[Snake]]:
    def generate() -> Iterator[Snake]:
        for t in range(b.M):
            for positions in itertools.product(range(b.R), repeat=b.L):
                yield b.snake(t, positions)

    return b.snake_count, generate()


class FamilyDocument(BaseModel):
    members: List[List[int]]


@dataclass(slots=True)
class CoverFamily:
    members: Tuple[FrozenSet[int], ...] = ()

    @classmethod
    def of(cls, members: Sequence[Sequence[int]]) -> "CoverFamily":
        return cls(tuple(frozenset(m) for m in members))

    @classmethod
    def from_json(cls, text: str) -> "CoverFamily":
        return cls.of(FamilyDocument.model_validate_json(text).members)

    def to_json(self) -> str:
        return json.dumps({"members": [sorted(m) for m in self.members]}, sort_keys=True)

    def check(self, b: BarrierInstance) -> None:
        for i, member in enumerate(self.members):
            bad = [e for e in member if not 0 <= e < b.graph.m]
            if bad:
                raise BarrierParameterError(f"member {i} references edge {min(bad)} outside the gadget")

    @property
    def incidence(self) -> int:
        return sum(len(m) for m in self.members)


class SearchStatus(str, Enum):
    UNCOVERED = "uncovered"
    COVERED = "covered"
    CLUSTERING_VIOLATION = "clustering_violation"


@dataclass(slots=True)
class SnakeSearch:
    status: SearchStatus
    method: str
    snake: Optional[Snake] = None
    member: Optional[int] = None
    layer: Optional[int] = None
    scanned: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status.value,
            "method": self.method,
            "snake": None if self.snake is None else list(self.snake.edges),
            "member": self.member,
            "layer": self.layer,
            "scanned": self.scanned,
        }


def find_uncovered_snake(
    b: BarrierInstance, fam: CoverFamily, budget: Optional[int] = None
) -> SnakeSearch:
    fam.check(b)
    for t in range(b.M):
        star = b.star_edge(t)
        holders = [i for i, member in enumerate(fam.members) if star in member]
        if len(holders) < b.L:
            return _diagonalize(b, fam, t, holders, budget)
    return _scan(b, fam, budget)


def _member_graph(b: BarrierInstance, member: FrozenSet[int]) -> Graph:
    return Graph(b.graph.n, (b.graph.edge(e) for e in sorted(member)))


def _diagonalize(
    b: BarrierInstance, fam: CoverFamily, t: int, holders: List[int], budget: Optional[int]
) -> SnakeSearch:
    """Route the snake through one omitted cycle edge per holder, each in its own layer.

    A holder left unmatched owns a whole layer cycle. That is a clustering violation only
    when the member breaks the bound; otherwise the search falls back to the scan.
    """
    omitted: Dict[int, Dict[int, int]] = {}
    bipartite = nx.Graph()
    tops = [("member", i) for i in holders]
    bipartite.add_nodes_from(tops)
    for i in holders:
        member = fam.members[i]
        gaps = {}
        for j in range(b.L):
            r = next((r for r in range(b.R) if b.cycle_edge(j, r) not in member), None)
            if r is not None:
                gaps[j] = r
                bipartite.add_edge(("member", i), ("layer", j))
        omitted[i] = gaps
    matching = nx.bipartite.hopcroft_karp_matching(bipartite, top_nodes=tops)
    unmatched = [i for i in holders if ("member", i) not in matching]
    if unmatched:
        for i in sorted(unmatched, key=lambda k: (len(omitted[k]), k)):
            if validators.verify_clustered(_member_graph(b, fam.members[i]), b.bound).ok:
                continue
            full = next(j for j in range(b.L) if j not in omitted[i])
            logger.info("member %s holds the whole cycle of layer %s", i, full)
            return SnakeSearch(
                status=SearchStatus.CLUSTERING_VIOLATION, method="diagonal", member=i, layer=full
            )
        logger.info("unmatched holders %s are clustered; scanning snakes", unmatched)
        return _scan(b, fam, budget)
    positions = [0] * b.L
    for i in holders:
        j = matching[("member", i)][1]
        positions[j] = omitted[i][j]
    snake = b.snake(t, positions)
    edges = set(snake.edges)
    for i, member in enumerate(fam.members):
        if edges <= member:
            raise NegpathError(f"diagonal snake is covered by member {i}")
    return SnakeSearch(status=SearchStatus.UNCOVERED, method="diagonal", snake=snake, scanned=1)


def _scan(b: BarrierInstance, fam: CoverFamily, budget: Optional[int]) -> SnakeSearch:
    budget = budget if budget is not None else load_settings().exhaustive_budget
    count, stream = snakes(b)
    if count > budget:
        raise validators.CensusBudgetExceeded(f"{count} snakes exceed the scan budget {budget}")
    scanned = 0
    for snake in stream:
        scanned += 1
        edges = set(snake.edges)
        if not any(edges <= member for member in fam.members):
            return SnakeSearch(
                status=SearchStatus.UNCOVERED, method="exhaustive", snake=snake, scanned=scanned
            )
    return SnakeSearch(status=SearchStatus.COVERED, method="exhaustive", scanned=scanned)


@dataclass(slots=True)
class FamilyAudit:
    coverage: SnakeSearch
    incidence: int
    required: int
    clustered: List[bool] = field(default_factory=list)
    diameters: List[int] = field(default_factory=list)
    incidence_bound_holds: Optional[bool] = None

    @property
    def all_clustered(self) -> Optional[bool]:
        return all(self.clustered) if self.clustered or self.incidence == 0 else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "coverage": self.coverage.to_dict(),
            "incidence": self.incidence,
            "required": self.required,
            "clustered": self.clustered,
            "diameters": self.diameters,
            "incidence_bound_holds": self.incidence_bound_holds,
        }


def audit_family(
    b: BarrierInstance,
    fam: CoverFamily,
    check_clustering: bool = True,
    budget: Optional[int] = None,
) -> FamilyAudit:
    """Clustering per member, coverage of all snakes, and the incidence count against M*L."""
    fam.check(b)
    audit = FamilyAudit(
        coverage=find_uncovered_snake(b, fam, budget),
        incidence=fam.incidence,
        required=b.M * b.L,
    )
    if check_clustering:
        for member in fam.members:
            report = validators.verify_clustered(_member_graph(b, member), b.bound)
            audit.clustered.append(report.ok)
            audit.diameters.append(report.measures.get("max_diameter", 0))
    covered = audit.coverage.status is SearchStatus.COVERED
    if covered and check_clustering and all(audit.clustered):
        audit.incidence_bound_holds = audit.incidence >= audit.required
        if not audit.incidence_bound_holds:
            logger.warning("covering clustered family with %s edges < %s", audit.incidence, audit.required)
    return audit
