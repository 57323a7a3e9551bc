from __future__ import annotations

import io
import logging
from collections import deque
from dataclasses import dataclass
from typing import IO, Dict, Iterable, Iterator, List, Sequence, Tuple, Union

from .models import NegpathError

logger = logging.getLogger(__name__)

# bound on (n + 2) * (W + 3); keeps potentials and layered products far from int64 range
OVERFLOW_LIMIT = 1 << 60

Edge = Tuple[int, int, int]


class DimacsFormatError(NegpathError):
    """Raised when a .gr document does not follow the grammar."""

    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class GraphOverflowError(NegpathError):
    """Raised when vertex count and weight magnitude break the overflow guard."""


def check_magnitude(n: int, max_abs_weight: int) -> None:
    if (n + 2) * (max_abs_weight + 3) >= OVERFLOW_LIMIT:
        raise GraphOverflowError(
            f"(n+2)*(W+3) >= 2^60 for n={n}, W={max_abs_weight}"
        )


class Graph:
    """Immutable directed multigraph with integer weights.

    Edges keep their insertion index; adjacency tables hold edge indices so
    parallel edges and self-loops stay distinguishable.
    """

    __slots__ = (
        "n",
        "tails",
        "heads",
        "weights",
        "out_adj",
        "in_adj",
        "deg_out",
        "deg_in",
        "deg_total",
        "max_abs_weight",
    )

    def __init__(self, n: int, edges: Iterable[Edge] = ()) -> None:
        if n < 0:
            raise ValueError(f"vertex count must be >= 0, got {n}")
        tails: List[int] = []
        heads: List[int] = []
        weights: List[int] = []
        out_adj: List[List[int]] = [[] for _ in range(n)]
        in_adj: List[List[int]] = [[] for _ in range(n)]
        max_abs = 0
        for index, (u, v, w) in enumerate(edges):
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {index} ({u}, {v}) out of range for n={n}")
            w = int(w)
            tails.append(u)
            heads.append(v)
            weights.append(w)
            out_adj[u].append(index)
            in_adj[v].append(index)
            if abs(w) > max_abs:
                max_abs = abs(w)
        check_magnitude(n, max_abs)
        self.n = n
        self.tails = tuple(tails)
        self.heads = tuple(heads)
        self.weights = tuple(weights)
        self.out_adj = tuple(tuple(a) for a in out_adj)
        self.in_adj = tuple(tuple(a) for a in in_adj)
        self.deg_out = tuple(len(a) for a in out_adj)
        self.deg_in = tuple(len(a) for a in in_adj)
        self.deg_total = tuple(o + i for o, i in zip(self.deg_out, self.deg_in))
        self.max_abs_weight = max_abs

    @property
    def m(self) -> int:
        return len(self.tails)

    def edge(self, index: int) -> Edge:
        return self.tails[index], self.heads[index], self.weights[index]

    def edges(self) -> Iterator[Edge]:
        return zip(self.tails, self.heads, self.weights)

    def has_negative_edge(self) -> bool:
        return any(w < 0 for w in self.weights)

    def with_weights(self, weights: Sequence[int]) -> "Graph":
        """Same structure, new weights; adjacency tables are shared."""
        if len(weights) != self.m:
            raise ValueError(f"expected {self.m} weights, got {len(weights)}")
        clone = object.__new__(Graph)
        weights = tuple(int(w) for w in weights)
        max_abs = max((abs(w) for w in weights), default=0)
        check_magnitude(self.n, max_abs)
        clone.n = self.n
        clone.tails = self.tails
        clone.heads = self.heads
        clone.weights = weights
        clone.out_adj = self.out_adj
        clone.in_adj = self.in_adj
        clone.deg_out = self.deg_out
        clone.deg_in = self.deg_in
        clone.deg_total = self.deg_total
        clone.max_abs_weight = max_abs
        return clone

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.tails == other.tails
            and self.heads == other.heads
            and self.weights == other.weights
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m}, W={self.max_abs_weight})"


@dataclass(frozen=True, slots=True)
class Potential:
    values: Tuple[int, ...]

    @classmethod
    def zero(cls, n: int) -> "Potential":
        return cls((0,) * n)

    @classmethod
    def of(cls, values: Iterable[int]) -> "Potential":
        return cls(tuple(int(x) for x in values))

    def __neg__(self) -> "Potential":
        return Potential(tuple(-x for x in self.values))

    def __add__(self, other: "Potential") -> "Potential":
        return Potential(tuple(a + b for a, b in zip(self.values, other.values, strict=True)))

    def scaled(self, factor: int) -> "Potential":
        return Potential(tuple(factor * x for x in self.values))

    def __getitem__(self, v: int) -> int:
        return self.values[v]

    def __len__(self) -> int:
        return len(self.values)


PotentialLike = Union[Potential, Sequence[int]]


def truncate_nonneg(g: Graph) -> Graph:
    if not g.has_negative_edge():
        return g
    return g.with_weights([w if w > 0 else 0 for w in g.weights])


def apply_potential(g: Graph, phi: PotentialLike) -> Graph:
    if len(phi) != g.n:
        raise ValueError(f"potential has {len(phi)} values for {g.n} vertices")
    return g.with_weights(
        [w + phi[u] - phi[v] for u, v, w in zip(g.tails, g.heads, g.weights)]
    )


def induced_edges(g: Graph, vertices: Iterable[int]) -> List[int]:
    """Indices of the edges of ``g`` with both endpoints in ``vertices``, in edge order."""
    inside = set(vertices)
    return [e for e in range(g.m) if g.tails[e] in inside and g.heads[e] in inside]


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> Tuple[Graph, Dict[int, int]]:
    keep = sorted(set(vertices))
    for v in keep:
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} out of range for n={g.n}")
    mapping = {v: i for i, v in enumerate(keep)}
    edges = [
        (mapping[g.tails[e]], mapping[g.heads[e]], g.weights[e])
        for e in induced_edges(g, keep)
    ]
    return Graph(len(keep), edges), mapping


def reachable_from(g: Graph, s: int) -> List[int]:
    """Vertices reachable from ``s`` in increasing index order."""
    seen = [False] * g.n
    seen[s] = True
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for e in g.out_adj[u]:
            v = g.heads[e]
            if not seen[v]:
                seen[v] = True
                queue.append(v)
    return [v for v in range(g.n) if seen[v]]


def _open_text(source: Union[str, bytes, IO]) -> IO:
    if isinstance(source, bytes):
        return io.BytesIO(source)
    if isinstance(source, str):
        return io.StringIO(source)
    return source


def load_dimacs(source: Union[str, bytes, IO]) -> Graph:
    stream = _open_text(source)
    n = m = None
    edges: List[Edge] = []
    lineno = 0
    for lineno, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise DimacsFormatError(lineno, "not valid UTF-8") from exc
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        tag = parts[0]
        if tag == "p":
            if n is not None:
                raise DimacsFormatError(lineno, "duplicate problem line")
            if len(parts) != 4 or parts[1] != "sp":
                raise DimacsFormatError(lineno, "expected 'p sp <n> <m>'")
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError as exc:
                raise DimacsFormatError(lineno, "non-integer vertex or edge count") from exc
            if n < 0 or m < 0:
                raise DimacsFormatError(lineno, "negative vertex or edge count")
        elif tag == "a":
            if n is None:
                raise DimacsFormatError(lineno, "arc before problem line")
            if len(parts) != 4:
                raise DimacsFormatError(lineno, "expected 'a <u> <v> <w>'")
            try:
                u, v, w = int(parts[1]), int(parts[2]), int(parts[3])
            except ValueError as exc:
                raise DimacsFormatError(lineno, "non-integer arc field") from exc
            if not (1 <= u <= n and 1 <= v <= n):
                raise DimacsFormatError(lineno, f"vertex index out of range 1..{n}")
            if (n + 2) * (abs(w) + 3) >= OVERFLOW_LIMIT:
                raise DimacsFormatError(lineno, f"weight magnitude {abs(w)} over bound")
            if len(edges) >= m:
                raise DimacsFormatError(lineno, f"more than {m} arcs")
            edges.append((u - 1, v - 1, w))
        else:
            raise DimacsFormatError(lineno, f"unknown line type {tag!r}")
    if n is None:
        raise DimacsFormatError(lineno, "missing problem line")
    if len(edges) != m:
        raise DimacsFormatError(lineno, f"declared {m} arcs, found {len(edges)}")
    logger.debug("loaded graph n=%s m=%s", n, m)
    return Graph(n, edges)


def dump_dimacs(g: Graph, comments: Iterable[str] = ()) -> str:
    lines = [f"c {text}" for text in comments]
    lines.append(f"p sp {g.n} {g.m}")
    lines.extend(f"a {u + 1} {v + 1} {w}" for u, v, w in g.edges())
    return "\n".join(lines) + "\n"
