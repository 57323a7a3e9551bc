from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from pydantic import BaseModel, Field

from .graph import Graph
from .models import NegpathError

logger = logging.getLogger(__name__)

# (tail, head, weight, base edge index or None)
PieceEdge = Tuple[int, int, int, Optional[int]]


class ProjectionError(NegpathError):
    """Raised when a projection breaks its homomorphism or representative invariants."""


class NodeEntry(BaseModel):
    id: int = Field(ge=0)
    pi: int = Field(ge=0)
    rep: bool = False


class ProjectionDocument(BaseModel):
    base_n: int = Field(ge=0)
    nodes: List[NodeEntry]
    edges: List[Tuple[int, int, int]]


class Projection:
    """Carrier graph G' with vertex map pi onto a base graph and representatives."""

    __slots__ = ("base_n", "pi", "rep", "carrier", "origin")

    def __init__(
        self,
        base_n: int,
        pi: Sequence[int],
        edges: Iterable[Tuple[int, int, int]],
        rep: Mapping[int, int],
        origin: Optional[Sequence[Optional[int]]] = None,
    ) -> None:
        self.base_n = base_n
        self.pi: Tuple[int, ...] = tuple(pi)
        self.rep: Dict[int, int] = dict(rep)
        self.carrier = Graph(len(self.pi), edges)
        if origin is None:
            origin = (None,) * self.carrier.m
        if len(origin) != self.carrier.m:
            raise ProjectionError(f"origin has {len(origin)} entries for {self.carrier.m} edges")
        self.origin: Tuple[Optional[int], ...] = tuple(origin)

    @classmethod
    def identity(cls, g: Graph) -> "Projection":
        return cls(g.n, range(g.n), g.edges(), {v: v for v in range(g.n)}, range(g.m))

    @property
    def present(self) -> set:
        return set(self.pi)

    def preimage(self, v: int) -> List[int]:
        return [x for x, pv in enumerate(self.pi) if pv == v]

    def check(self) -> None:
        """Structural self-check; homomorphism against a base lives in verify_projection."""
        for x, v in enumerate(self.pi):
            if not 0 <= v < self.base_n:
                raise ProjectionError(f"carrier vertex {x} maps to {v}, outside base range")
        for v in self.present:
            x = self.rep.get(v)
            if x is None:
                raise ProjectionError(f"present vertex {v} has no representative")
            if not 0 <= x < len(self.pi) or self.pi[x] != v:
                raise ProjectionError(f"representative {x} of {v} does not map to {v}")
        for v in self.rep:
            if v not in self.present:
                raise ProjectionError(f"vertex {v} has a representative but no copy")

    def with_weights(
        self, weights: Sequence[int], origin: Optional[Sequence[Optional[int]]] = None
    ) -> "Projection":
        """Same carrier structure with new weights; adjacency is shared."""
        origin = self.origin if origin is None else tuple(origin)
        if len(origin) != self.carrier.m:
            raise ProjectionError(f"origin has {len(origin)} entries for {self.carrier.m} edges")
        clone = object.__new__(Projection)
        clone.base_n = self.base_n
        clone.pi = self.pi
        clone.rep = dict(self.rep)
        clone.carrier = self.carrier.with_weights(weights)
        clone.origin = origin
        return clone

    def to_dict(self) -> Dict:
        reps = set(self.rep.values())
        return {
            "base_n": self.base_n,
            "nodes": [{"id": x, "pi": v, "rep": x in reps} for x, v in enumerate(self.pi)],
            "edges": [[u, v, w] for u, v, w in self.carrier.edges()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Projection":
        doc = ProjectionDocument.model_validate_json(text)
        nodes = sorted(doc.nodes, key=lambda node: node.id)
        if [node.id for node in nodes] != list(range(len(nodes))):
            raise ProjectionError("node ids must be 0..N-1")
        rep = {}
        for node in nodes:
            if node.rep:
                if node.pi in rep:
                    raise ProjectionError(f"base vertex {node.pi} has two representatives")
                rep[node.pi] = node.id
        n = len(nodes)
        for u, v, _ in doc.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ProjectionError(f"edge ({u}, {v}) references a missing node")
        return cls(doc.base_n, [node.pi for node in nodes], doc.edges, rep)


@dataclass(slots=True)
class Piece:
    """Mutable projection under construction; owned by exactly one recursion frame."""

    pi: List[int] = field(default_factory=list)
    edges: List[PieceEdge] = field(default_factory=list)
    rep: Dict[int, int] = field(default_factory=dict)

    @classmethod
    def from_projection(cls, p: Projection) -> "Piece":
        c = p.carrier
        return cls(
            list(p.pi),
            [(u, v, w, o) for (u, v, w), o in zip(c.edges(), p.origin)],
            dict(p.rep),
        )

    @classmethod
    def induced(cls, base: Graph, vertices: Iterable[int]) -> "Piece":
        """G[vertices] as a projection whose copies are their own representatives."""
        order = sorted(vertices)
        local = {v: i for i, v in enumerate(order)}
        edges: List[PieceEdge] = []
        for v in order:
            x = local[v]
            for e in base.out_adj[v]:
                y = local.get(base.heads[e])
                if y is not None:
                    edges.append((x, y, base.weights[e], e))
        return cls(order, edges, local)

    def to_projection(self, base_n: int) -> Projection:
        return Projection(
            base_n,
            self.pi,
            [(u, v, w) for u, v, w, _ in self.edges],
            self.rep,
            [o for *_, o in self.edges],
        )


def layer_pieces(base: Graph, pieces: Sequence[Piece]) -> Piece:
    """Ordered gluing of part projections.

    Representatives come from the earliest part that offers one for a vertex;
    a base edge (a, b) adds an edge from every copy of a in part i to rep(b)
    when rep(b) lives in a later part. Consumes its inputs.
    """
    pieces = [p for p in pieces if p.pi]
    if not pieces:
        return Piece()
    if len(pieces) == 1:
        return pieces[0]
    rep: Dict[int, int] = {}
    owner: Dict[int, int] = {}
    offsets: List[int] = []
    offset = 0
    for idx, piece in enumerate(pieces):
        offsets.append(offset)
        for v, x in piece.rep.items():
            if v not in rep:
                rep[v] = x + offset
                owner[v] = idx
        offset += len(piece.pi)

    # base edges into vertices whose rep lives past the first part, by tail, in edge order
    tails, in_adj = base.tails, base.in_adj
    into_later: Dict[int, List[Tuple[int, int]]] = {}
    for b, j in owner.items():
        if j == 0:
            continue
        for e in in_adj[b]:
            into_later.setdefault(tails[e], []).append((e, j))
    for targets in into_later.values():
        targets.sort()

    heads, weights = base.heads, base.weights
    cross: List[PieceEdge] = []
    for idx in range(len(pieces) - 1):
        off = offsets[idx]
        for x, a in enumerate(pieces[idx].pi):
            targets = into_later.get(a)
            if targets is None:
                continue
            for e, j in targets:
                if j > idx:
                    cross.append((x + off, rep[heads[e]], weights[e], e))

    merged = pieces[0]
    for idx in range(1, len(pieces)):
        piece = pieces[idx]
        off = offsets[idx]
        merged.pi.extend(piece.pi)
        merged.edges.extend((u + off, v + off, w, o) for u, v, w, o in piece.edges)
    merged.edges.extend(cross)
    merged.rep = rep
    return merged


def layer_projections(base: Graph, parts: Sequence[Projection]) -> Projection:
    for index, part in enumerate(parts):
        try:
            part.check()
        except ProjectionError as exc:
            raise ProjectionError(f"part {index}: {exc}") from exc
        if part.base_n != base.n:
            raise ProjectionError(f"part {index} projects onto {part.base_n} vertices, base has {base.n}")
    if len(parts) == 1:
        return parts[0]
    merged = layer_pieces(base, [Piece.from_projection(p) for p in parts])
    return merged.to_projection(base.n)
