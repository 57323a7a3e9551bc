from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .. import validators
from ..config import load_settings
from ..graph import Graph, apply_potential, truncate_nonneg
from ..metrics import track_lambda_retry, track_level
from ..models import INF, Dist, NegpathError, Preset, ShortestPathResult, VerifyReport, log_n
from ..projection import Projection, ProjectionError
from .path_cover import PathCoverParams, path_cover
from .sssp import ContractViolation, SccDecomposition, dag_potential_sssp, few_neg_sssp, scc

logger = logging.getLogger(__name__)

PRACTICAL_LAMBDA = 16
PRACTICAL_BASE_K = 32


class InvalidRestrictedInstance(NegpathError):
    """Raised when a graph is not a restricted instance."""


class LambdaExhausted(NegpathError):
    """Raised when no slack within the retry budget gives a small enough cover diameter."""


def paper_solver_lambda(n: int) -> int:
    return 10000 * log_n(n) ** 6


class SolverParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    preset: Preset = Preset.PRACTICAL
    lam: Optional[int] = Field(default=None, gt=0)
    base_k: Optional[int] = Field(default=None, ge=0)
    lam_retries: int = Field(default=6, ge=0)
    adaptive: bool = True
    check_invariants: bool = False
    fallback_on_exhaustion: bool = True
    scale_offset: int = Field(default=1, ge=1)

    @classmethod
    def from_settings(cls, **overrides: Any) -> "SolverParams":
        settings = load_settings()
        preset = Preset(settings.preset)
        values: Dict[str, Any] = {
            "preset": preset,
            "lam": settings.lam if preset is Preset.PRACTICAL else None,
            "base_k": settings.base_k if preset is Preset.PRACTICAL else None,
            "lam_retries": settings.lambda_retries,
            "check_invariants": settings.check_invariants,
            "scale_offset": settings.scale_offset,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def lambda_for(self, n: int) -> int:
        if self.lam is not None:
            return self.lam
        return paper_solver_lambda(n) if self.preset is Preset.PAPER else PRACTICAL_LAMBDA

    def base_threshold(self, n: int) -> int:
        if self.base_k is not None:
            return self.base_k
        if self.preset is Preset.PAPER:
            return 2 * self.lambda_for(n)
        return PRACTICAL_BASE_K

    @staticmethod
    def d_cov(k: int, lam: int) -> int:
        return max(1, k // (2 * lam))

    @staticmethod
    def copies(lam: int) -> int:
        return 2 * lam


@dataclass(slots=True)
class LevelStats:
    depth: int
    k: int
    n: int
    m: int
    base_case: bool = False
    lam: int = 0
    d_cov: int = 0
    carrier_m: int = 0
    growth: float = 1.0
    diameter_bound: int = 0
    retries: int = 0
    case1: int = 0
    case2: int = 0
    fallback: bool = False


@dataclass(slots=True)
class SolverTrace:
    levels: List[LevelStats] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return max((lv.depth for lv in self.levels), default=-1) + 1

    @property
    def growth_factors(self) -> List[float]:
        return [lv.growth for lv in self.levels if not lv.base_case and not lv.fallback]

    @property
    def case_counts(self) -> Tuple[int, int]:
        return (
            sum(lv.case1 for lv in self.levels),
            sum(lv.case2 for lv in self.levels),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {"levels": [asdict(lv) for lv in self.levels]}


@dataclass(slots=True)
class RestrictedInstance:
    graph: Graph
    source: int
    capped: int = 0
    verdict: Optional[VerifyReport] = None

    @classmethod
    def normalize(cls, g: Graph, s: int) -> "RestrictedInstance":
        """Drop edges heavier than n (they lie on no shortest path) and run the cheap checks."""
        keep = [e for e in range(g.m) if g.weights[e] <= g.n]
        capped = g.m - len(keep)
        if capped:
            g = Graph(g.n, (g.edge(e) for e in keep))
        low = min(g.weights, default=0)
        if low < -1:
            raise InvalidRestrictedInstance(f"weight {low} below -1")
        reached = {g.heads[e] for e in g.out_adj[s] if g.weights[e] == 0}
        missing = [v for v in range(g.n) if v != s and v not in reached]
        if missing:
            raise InvalidRestrictedInstance(f"source {s} has no 0-edge to vertex {missing[0]}")
        return cls(graph=g, source=s, capped=capped)

    def validate(self) -> VerifyReport:
        if self.verdict is None:
            self.verdict = validators.verify_restricted(self.graph, self.source)
            self.verdict.measures["capped_edges"] = self.capped
        return self.verdict


@dataclass(slots=True)
class LayeredProduct:
    graph: Graph
    copies: int
    carrier_n: int
    source: int
    origin: Tuple[Optional[int], ...]

    def locate(self, z: int) -> Tuple[int, int]:
        """(layer, carrier vertex) of a copy."""
        return divmod(z, self.carrier_n)

    def expand_potential(self, carrier_phi: List[int]) -> List[int]:
        return list(carrier_phi) * self.copies + [0]

    def component_labels(self, carrier: SccDecomposition) -> List[int]:
        """Topological SCC labels of the product from those of one carrier copy.

        The hub comes first and copies follow in layer order; links only run
        into the next copy, so no component spans two layers.
        """
        count = carrier.count
        labels = [1 + layer * count + c for layer in range(self.copies) for c in carrier.comp]
        labels.append(0)
        return labels


def restore_negative_weights(cover: Projection, h: Graph) -> Projection:
    """Re-attach each carrier edge's original weight from h."""
    c = cover.carrier
    by_ends: Optional[Dict[Tuple[int, int], List[int]]] = None
    weights: List[int] = []
    origins: List[int] = []
    for index, (x, y, w) in enumerate(c.edges()):
        a, b = cover.pi[x], cover.pi[y]
        o = cover.origin[index]
        if o is None:
            if by_ends is None:
                by_ends = {}
                for e, (u, v, _) in enumerate(h.edges()):
                    by_ends.setdefault((u, v), []).append(e)
            candidates = [e for e in by_ends.get((a, b), []) if max(0, h.weights[e]) == w]
            if not candidates:
                raise ProjectionError(f"carrier edge {index} has no base edge {a}->{b} of weight {w}")
            if len({h.weights[e] for e in candidates}) > 1:
                raise ProjectionError(f"carrier edge {index} matches parallel base edges of different weight")
            o = candidates[0]
        elif h.tails[o] != a or h.heads[o] != b or max(0, h.weights[o]) != w:
            raise ProjectionError(f"carrier edge {index} disagrees with base edge {o}")
        weights.append(h.weights[o])
        origins.append(o)
    return cover.with_weights(weights, origins)


def scc_restricted_instance(
    cover: Projection, dec: Optional[SccDecomposition] = None
) -> Tuple[Graph, int]:
    """Keep intra-SCC carrier edges and add a super-source with 0-edges to every carrier vertex."""
    c = cover.carrier
    dec = dec if dec is not None else scc(c)
    edges = [(u, v, w) for u, v, w in c.edges() if dec.comp[u] == dec.comp[v]]
    source = c.n
    edges.extend((source, v, 0) for v in range(c.n))
    return Graph(c.n + 1, edges), source


def build_layered_product(cover: Projection, h: Graph, x: int, source: int) -> LayeredProduct:
    """x copies of the carrier chained by base edges into the next copy's representatives."""
    if x < 1:
        raise ContractViolation(f"copy count must be >= 1, got {x}")
    c = cover.carrier
    size = c.n
    carrier_edges = list(c.edges())
    links: List[Tuple[int, int, int, int]] = []
    for a in range(size):
        for e in h.out_adj[cover.pi[a]]:
            r = cover.rep.get(h.heads[e])
            if r is not None:
                links.append((a, r, h.weights[e], e))
    edges: List[Tuple[int, int, int]] = []
    origin: List[Optional[int]] = []
    for layer in range(x):
        off = layer * size
        edges.extend((a + off, b + off, w) for a, b, w in carrier_edges)
        origin.extend(cover.origin)
        if layer + 1 < x:
            nxt = off + size
            edges.extend((a + off, r + nxt, w) for a, r, w, _ in links)
            origin.extend(e for *_, e in links)
    hub = x * size
    starts = [a for a in range(size) if cover.pi[a] == source]
    for layer in range(x):
        edges.extend((hub, a + layer * size, 0) for a in starts)
        origin.extend([None] * len(starts))
    return LayeredProduct(
        graph=Graph(hub + 1, edges), copies=x, carrier_n=size, source=hub, origin=tuple(origin)
    )


def ksssp(
    inst: RestrictedInstance,
    k: int,
    params: SolverParams,
    *,
    trace: Optional[SolverTrace] = None,
) -> ShortestPathResult:
    """Exact distances on a restricted instance whose shortest paths use at most k negative edges."""
    if params.check_invariants:
        report = inst.validate()
        if not report.ok:
            raise InvalidRestrictedInstance(f"instance fails {report.counterexample}")
    return _solve_level(inst.graph, inst.source, k, params, trace or SolverTrace(), 0)


def _solve_level(
    h: Graph, s: int, k: int, params: SolverParams, trace: SolverTrace, depth: int
) -> ShortestPathResult:
    if k < 0:
        raise ContractViolation(f"k must be >= 0, got {k}")
    if k <= params.base_threshold(h.n):
        track_level("base")
        trace.levels.append(LevelStats(depth=depth, k=k, n=h.n, m=h.m, base_case=True))
        return few_neg_sssp(h, s, k)

    level = LevelStats(depth=depth, k=k, n=h.n, m=h.m)
    trace.levels.append(level)
    h_nonneg = truncate_nonneg(h)
    lam = params.lambda_for(h.n)
    while True:
        d_cov = params.d_cov(k, lam)
        if k // (d_cov + 1) + 1 > params.copies(lam):
            raise ContractViolation(f"{params.copies(lam)} copies cannot hold a {k}-path at d_cov={d_cov}")
        cover, stats = path_cover(
            h_nonneg, PathCoverParams(d=d_cov, lam=lam, n=h.n, preset=params.preset)
        )
        level.lam, level.d_cov = lam, d_cov
        level.carrier_m, level.growth = stats.carrier_m, stats.growth
        level.diameter_bound = stats.diameter_bound
        level.case1, level.case2 = stats.case1, stats.case2
        if 2 * stats.diameter_bound <= k:
            break
        if params.preset is Preset.PAPER:
            raise ContractViolation(
                f"cover diameter bound {stats.diameter_bound} exceeds k/2 for k={k} under paper preset"
            )
        if not params.adaptive or level.retries >= params.lam_retries:
            if params.fallback_on_exhaustion:
                logger.warning(
                    "slack exhausted at depth=%s k=%s lam=%s diam=%s; finishing level with layered Dijkstra",
                    depth, k, lam, stats.diameter_bound,
                )
                level.fallback = True
                return few_neg_sssp(h, s, k)
            raise LambdaExhausted(
                f"diameter bound {stats.diameter_bound} > k/2 after {level.retries} retries (k={k}, lam={lam})"
            )
        level.retries += 1
        lam *= 2
        track_lambda_retry()
        logger.info("cover diameter %s > k/2 at k=%s; retrying with lam=%s", stats.diameter_bound, k, lam)

    track_level("cover", stats.growth)
    logger.debug(
        "ksssp depth=%s k=%s n=%s m=%s lam=%s d_cov=%s carrier_m=%s",
        depth, k, h.n, h.m, lam, d_cov, stats.carrier_m,
    )
    restored = restore_negative_weights(cover, h)
    carrier_scc = scc(restored.carrier)
    sub_graph, sub_source = scc_restricted_instance(restored, carrier_scc)
    if params.check_invariants:
        report = validators.verify_restricted(sub_graph, sub_source)
        if not report.ok:
            raise InvalidRestrictedInstance(
                f"recursive instance at depth {depth + 1} fails {report.counterexample}"
            )
    sub = _solve_level(sub_graph, sub_source, k // 2, params, trace, depth + 1)
    carrier_phi = [int(d) for d in sub.dist[: restored.carrier.n]]

    product = build_layered_product(restored, h, params.copies(lam), s)
    phi = product.expand_potential(carrier_phi)
    reduced = dag_potential_sssp(
        apply_potential(product.graph, phi), product.source, product.component_labels(carrier_scc)
    )
    return _collapse(h, s, restored, product, reduced, phi)


def _collapse(
    h: Graph,
    s: int,
    cover: Projection,
    product: LayeredProduct,
    reduced: ShortestPathResult,
    phi: List[int],
) -> ShortestPathResult:
    """Minimum over copies; ties go to the lowest layer, then the lowest carrier index."""
    dist: List[Dist] = [INF] * h.n
    best: List[Optional[int]] = [None] * h.n
    for z in range(product.copies * product.carrier_n):
        d = reduced.dist[z]
        if d == INF:
            continue
        value = d + phi[z]
        u = cover.pi[z % product.carrier_n]
        if value < dist[u]:
            dist[u] = value
            best[u] = z
    parent: List[Optional[int]] = [None] * h.n
    for u in range(h.n):
        z = best[u]
        if z is None or u == s:
            continue
        e = reduced.parent[z]
        parent[u] = None if e is None else product.origin[e]
    return ShortestPathResult(source=s, dist=dist, parent=parent)
