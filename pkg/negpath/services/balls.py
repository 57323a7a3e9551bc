from __future__ import annotations

import heapq
import logging
from fractions import Fraction
from typing import AbstractSet, Dict, List, Optional, Sequence, Set, Tuple

from ..graph import Graph
from ..models import Direction
from .sssp import ContractViolation

logger = logging.getLogger(__name__)


class BallGrower:
    """Resumable Dijkstra that grows Ball(u, i*d) one radius step at a time.

    Each call to :meth:`step` spends one unit of memory-access budget. Settling
    a vertex charges its total degree in the top-level graph, so two growers
    advanced in strict alternation consume budget at the same rate.
    The grower stops at the smallest i >= 1 with
    deg(Ball(u, i*d)) <= (1 + eps_prime) * deg(Ball(u, (i-1)*d)).
    """

    def __init__(
        self,
        g: Graph,
        region: AbstractSet[int],
        center: int,
        direction: Direction,
        d: int,
        eps_prime: Fraction,
        degree: Optional[Sequence[int]] = None,
    ) -> None:
        if center not in region:
            raise ContractViolation(f"center {center} is not in the region")
        if d < 0:
            raise ContractViolation(f"radius step must be >= 0, got {d}")
        self.g = g
        self.region = region
        self.center = center
        self.direction = Direction(direction)
        self.d = d
        self.eps_prime = Fraction(eps_prime)
        self.degree = g.deg_total if degree is None else degree
        self._adj = g.out_adj if self.direction is Direction.OUT else g.in_adj
        self._ends = g.heads if self.direction is Direction.OUT else g.tails

        self.dist: Dict[int, int] = {center: 0}
        self.parent: Dict[int, int] = {}
        self.settled: List[int] = []
        self._settled_set: Set[int] = set()
        self._heap: List[Tuple[int, int]] = [(0, center)]
        self._pending = 0
        self.layer = 0
        self.consumed = 0
        self.done = False
        self.ball_degree = 0
        self.inner_degree = 0
        self._inner_size = 0

    @property
    def i(self) -> int:
        return self.layer

    @property
    def outer(self) -> Set[int]:
        """Ball(u, i*d) once done."""
        return set(self.settled)

    @property
    def inner(self) -> Set[int]:
        """Ball(u, (i-1)*d) once done."""
        return set(self.settled[: self._inner_size])

    @property
    def outer_degree(self) -> int:
        return self.ball_degree

    def step(self) -> bool:
        """Spend one budget unit; returns True while the grower is still running."""
        if self.done:
            return False
        if self._pending:
            self._pending -= 1
            self.consumed += 1
            return True
        while True:
            top = self._peek()
            radius = self.layer * self.d
            if top is None or top[0] > radius:
                if self._close_layer():
                    return False
                continue
            charge = self._settle()
            if charge:
                self._pending = charge - 1
                self.consumed += 1
                return True

    def finish(self) -> "BallGrower":
        while self.step():
            pass
        return self

    def _peek(self) -> Optional[Tuple[int, int]]:
        heap = self._heap
        while heap and heap[0][1] in self._settled_set:
            heapq.heappop(heap)
        return heap[0] if heap else None

    def _close_layer(self) -> bool:
        if self.layer >= 1:
            grown = self.ball_degree
            base = self.inner_degree
            eps = self.eps_prime
            if grown * eps.denominator <= (eps.denominator + eps.numerator) * base:
                self.done = True
                logger.debug(
                    "ball %s from %s done i=%s |ball|=%s deg=%s budget=%s",
                    self.direction.value,
                    self.center,
                    self.layer,
                    len(self.settled),
                    grown,
                    self.consumed,
                )
                return True
        self.inner_degree = self.ball_degree
        self._inner_size = len(self.settled)
        self.layer += 1
        return False

    def _settle(self) -> int:
        du, u = heapq.heappop(self._heap)
        self._settled_set.add(u)
        self.settled.append(u)
        charge = self.degree[u]
        self.ball_degree += charge
        weights, ends, region, dist = self.g.weights, self._ends, self.region, self.dist
        for e in self._adj[u]:
            v = ends[e]
            if v not in region or v in self._settled_set:
                continue
            w = weights[e]
            if w < 0:
                raise ContractViolation(f"negative weight {w} on edge {e} while growing a ball")
            nd = du + w
            old = dist.get(v)
            if old is None or nd < old:
                dist[v] = nd
                self.parent[v] = e
                heapq.heappush(self._heap, (nd, v))
        return charge


def grow_thin_layer(
    g: Graph,
    region: AbstractSet[int],
    center: int,
    direction: Direction,
    d: int,
    eps_prime: Fraction,
    degree: Optional[Sequence[int]] = None,
) -> BallGrower:
    return BallGrower(g, region, center, direction, d, eps_prime, degree)
