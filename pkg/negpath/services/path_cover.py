from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Any, Dict, Generator, List, Mapping, Optional, Set, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config import load_settings
from ..graph import Graph
from ..metrics import track_cover_case
from ..models import Direction, NegpathError, Preset, log_n
from ..projection import Piece, Projection, layer_pieces
from .balls import BallGrower
from .sssp import dijkstra_within

logger = logging.getLogger(__name__)

# a child request: region to cover and its top-level degree
Request = Tuple[Set[int], int]


class PathCoverError(NegpathError):
    """Raised when a path cover cannot be built from the given input."""


def paper_cover_lambda(n: int) -> int:
    return 10000 * log_n(n) ** 4


class PathCoverParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    d: int = Field(ge=0)
    lam: int = Field(gt=0)
    n: int = Field(ge=0)
    preset: Preset = Preset.PRACTICAL

    @model_validator(mode="after")
    def _paper_floor(self) -> "PathCoverParams":
        if self.preset is Preset.PAPER and self.lam < paper_cover_lambda(self.n):
            raise ValueError(
                f"paper preset needs lambda >= {paper_cover_lambda(self.n)} for n={self.n}"
            )
        return self

    @classmethod
    def for_graph(
        cls,
        g: Graph,
        d: int,
        lam: Optional[int] = None,
        preset: Preset = Preset.PRACTICAL,
    ) -> "PathCoverParams":
        preset = Preset(preset)
        if lam is None:
            lam = paper_cover_lambda(g.n) if preset is Preset.PAPER else load_settings().lam
        return cls(d=d, lam=lam, n=g.n, preset=preset)

    @property
    def epsilon_prime(self) -> Fraction:
        return Fraction(9 * log_n(self.n), self.lam)

    @property
    def epsilon(self) -> float:
        return self.lam ** -0.5

    def shrinks(self, deg_ball: int, deg_region: int) -> bool:
        """deg(B) < (1 - 1/sqrt(lam)) * deg(A), decided in integers."""
        gap = deg_region - deg_ball
        return gap > 0 and self.lam * gap * gap > deg_region * deg_region


@dataclass(slots=True)
class CoverStats:
    base_n: int = 0
    base_m: int = 0
    carrier_n: int = 0
    carrier_m: int = 0
    sum_proj_deg: int = 0
    max_i_out: int = 0
    max_i_in: int = 0
    case1: int = 0
    case2: int = 0
    empty_mid: int = 0
    diameter_bound: int = 0
    nodes: int = 0
    max_depth: int = 0

    @property
    def base_degree(self) -> int:
        return 2 * self.base_m

    @property
    def growth(self) -> float:
        return self.carrier_m / self.base_m if self.base_m else 1.0

    def size_bound_holds(self) -> bool:
        """|E(G')| <= sum of deg_G(pi(v')) over carrier vertices."""
        return self.carrier_m <= self.sum_proj_deg

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["growth"] = round(self.growth, 6)
        return payload


def degree_budget_holds(stats: CoverStats, lam: int) -> bool:
    """sum deg_G(pi(v')) <= (1 + 100 * L^2 / sqrt(lam)) * deg_G(V), exactly.

    deg is total degree, so the whole-graph budget is deg_G(V) = 2m.
    """
    total = stats.base_degree
    excess = stats.sum_proj_deg - total
    if excess <= 0:
        return True
    scale = 100 * log_n(stats.base_n) ** 2 * total
    return lam * excess * excess <= scale * scale


def ball_steps_bound_holds(stats: CoverStats, lam: int) -> bool:
    """Every ball stopped within lam/4 radius steps."""
    return 4 * max(stats.max_i_out, stats.max_i_in) <= lam


def build_middle_graph(
    g: Graph,
    b_out: Set[int],
    b_in: Set[int],
    t_out: Mapping[int, int],
    t_in: Mapping[int, int],
    pivot: Optional[int] = None,
) -> Set[int]:
    """Vertices on tree paths u -> M in t_out and M -> u in t_in, M = b_out & b_in.

    ``t_out`` maps a vertex to the edge entering it from its parent; ``t_in``
    maps a vertex to the edge leaving it toward its parent.
    """
    meet = b_out & b_in if len(b_out) <= len(b_in) else b_in & b_out
    if not meet:
        return set()
    if pivot is None:
        roots = [v for v in b_out if v not in t_out]
        if len(roots) != 1:
            raise PathCoverError(f"out-tree has {len(roots)} roots")
        pivot = roots[0]
    marked_out = _mark_ancestors(meet, t_out, g.tails, b_out, pivot, "out")
    marked_in = _mark_ancestors(meet, t_in, g.heads, b_in, pivot, "in")
    return marked_out | marked_in


def _mark_ancestors(
    targets: Set[int],
    tree: Mapping[int, int],
    step_to: Tuple[int, ...],
    ball: Set[int],
    root: int,
    label: str,
) -> Set[int]:
    marked: Set[int] = set()
    for target in sorted(targets):
        v = target
        while v not in marked:
            if v not in ball:
                raise PathCoverError(f"{label}-tree path leaves its ball at vertex {v}")
            marked.add(v)
            if v == root:
                break
            e = tree.get(v)
            if e is None:
                raise PathCoverError(f"{label}-tree has no parent for vertex {v}")
            v = step_to[e]
        if len(marked) > len(ball):
            raise PathCoverError(f"{label}-tree parent links are cyclic")
    return marked


class _CoverBuilder:
    def __init__(self, g: Graph, params: PathCoverParams, stats: CoverStats) -> None:
        self.g = g
        self.params = params
        self.stats = stats
        self.eps_prime = params.epsilon_prime

    def run(self, region: Set[int], degree: int) -> Piece:
        """Drive the recursion with an explicit stack of suspended frames."""
        stack: List[Generator[Request, Piece, Piece]] = [self._node(region, degree)]
        value: Optional[Piece] = None
        while stack:
            self.stats.max_depth = max(self.stats.max_depth, len(stack))
            try:
                request = stack[-1].send(value)
            except StopIteration as stop:
                stack.pop()
                value = stop.value
                continue
            stack.append(self._node(*request))
            value = None
        return value if value is not None else Piece()

    def _race(self, fwd: BallGrower, bwd: BallGrower) -> BallGrower:
        while True:
            if not fwd.step():
                return fwd
            if not bwd.step():
                return bwd

    def _node(self, region: Set[int], degree: int) -> Generator[Request, Piece, Piece]:
        g = self.g
        if not region:
            return Piece()
        if len(region) == 1:
            (v,) = region
            loops = [(0, 0, g.weights[e], e) for e in g.out_adj[v] if g.heads[e] == v]
            return Piece([v], loops, {v: 0})

        self.stats.nodes += 1
        d = self.params.d
        u = min(region)
        fwd = BallGrower(g, region, u, Direction.OUT, d, self.eps_prime)
        bwd = BallGrower(g, region, u, Direction.IN, d, self.eps_prime)
        first = self._race(fwd, bwd)
        if first is fwd:
            self.stats.max_i_out = max(self.stats.max_i_out, fwd.i)
        else:
            self.stats.max_i_in = max(self.stats.max_i_in, bwd.i)

        if self.params.shrinks(first.outer_degree, degree):
            self.stats.case1 += 1
            track_cover_case("1")
            return (yield from self._split(region, degree, first))

        other = bwd if first is fwd else fwd
        other.finish()
        if other is fwd:
            self.stats.max_i_out = max(self.stats.max_i_out, fwd.i)
        else:
            self.stats.max_i_in = max(self.stats.max_i_in, bwd.i)
        b_out, b_in = fwd.outer, bwd.outer
        mid = build_middle_graph(g, b_out, b_in, fwd.parent, bwd.parent, u)
        if not mid:
            self.stats.empty_mid += 1
            track_cover_case("empty_mid")
            logger.warning("empty ball intersection at pivot %s; splitting on one side", u)
            return (yield from self._split(region, degree, first))

        self.stats.case2 += 1
        track_cover_case("2")
        self._record_diameter(u, mid)
        logger.debug(
            "cover node pivot=%s |A|=%s case=2 |mid|=%s i_out=%s i_in=%s",
            u, len(region), len(mid), fwd.i, bwd.i,
        )
        tilde = b_in - fwd.inner
        tilde_degree = sum(g.deg_total[v] for v in tilde)
        bar_in_degree = degree - bwd.inner_degree
        region -= bwd.inner
        mid_piece = Piece.induced(g, mid)
        # paths leaving B_in stay in A - inner(B_in): those copies take rep from the last part
        for v in mid - b_in:
            del mid_piece.rep[v]
        h_tilde = yield (tilde, tilde_degree)
        h_bar_in = yield (region, bar_in_degree)
        return layer_pieces(g, [h_tilde, mid_piece, h_bar_in])

    def _split(
        self, region: Set[int], degree: int, grower: BallGrower
    ) -> Generator[Request, Piece, Piece]:
        outer, outer_degree = grower.outer, grower.outer_degree
        rest_degree = degree - grower.inner_degree
        region -= grower.inner
        logger.debug(
            "cover node pivot=%s case=1 side=%s |B|=%s |rest|=%s",
            grower.center, grower.direction.value, len(outer), len(region),
        )
        if grower.direction is Direction.OUT:
            h_rest = yield (region, rest_degree)
            h_ball = yield (outer, outer_degree)
            return layer_pieces(self.g, [h_rest, h_ball])
        h_ball = yield (outer, outer_degree)
        h_rest = yield (region, rest_degree)
        return layer_pieces(self.g, [h_ball, h_rest])

    def _record_diameter(self, u: int, mid: Set[int]) -> None:
        if len(mid) == 1:
            return
        ecc_out = max(dijkstra_within(self.g, u, mid).values())
        ecc_in = max(dijkstra_within(self.g, u, mid, reverse=True).values())
        self.stats.diameter_bound = max(self.stats.diameter_bound, ecc_out + ecc_in)


def path_cover(g: Graph, params: PathCoverParams) -> Tuple[Projection, CoverStats]:
    """Build a d-path-covering projection of ``g`` whose carrier SCCs stay inside middle graphs."""
    if g.has_negative_edge():
        raise PathCoverError("path cover needs nonnegative weights; truncate the graph first")
    if params.n != g.n:
        raise PathCoverError(f"params were built for n={params.n}, graph has n={g.n}")
    stats = CoverStats(base_n=g.n, base_m=g.m)
    root = _CoverBuilder(g, params, stats).run(set(range(g.n)), sum(g.deg_total))
    projection = root.to_projection(g.n)
    stats.carrier_n = projection.carrier.n
    stats.carrier_m = projection.carrier.m
    stats.sum_proj_deg = sum(g.deg_total[v] for v in projection.pi)
    logger.debug(
        "path cover n=%s m=%s d=%s lam=%s -> carrier n=%s m=%s diam<=%s case1=%s case2=%s",
        g.n, g.m, params.d, params.lam, stats.carrier_n, stats.carrier_m,
        stats.diameter_bound, stats.case1, stats.case2,
    )
    return projection, stats
