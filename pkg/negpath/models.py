from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

INF = math.inf
NEG_INF = -math.inf

# finite distances are ints; the two float sentinels mark unreachable / unbounded
Dist = Union[int, float]


class NegpathError(Exception):
    """Base class for every error raised by negpath."""


class Preset(str, Enum):
    PRACTICAL = "practical"
    PAPER = "paper"


class Direction(str, Enum):
    OUT = "out"
    IN = "in"


class Engine(str, Enum):
    SCALING = "scaling"
    BF = "bf"


def format_dist(value: Dist) -> Union[int, str]:
    if value == INF:
        return "inf"
    if value == NEG_INF:
        return "-inf"
    return int(value)


def parse_dist(value: Union[int, str]) -> Dist:
    if value == "inf":
        return INF
    if value == "-inf":
        return NEG_INF
    return int(value)


@dataclass(slots=True)
class ShortestPathResult:
    source: int
    dist: List[Dist]
    parent: List[Optional[int]]

    def reachable(self, v: int) -> bool:
        return self.dist[v] != INF

    def path_to(self, v: int, tails: Sequence[int]) -> List[int]:
        """Tree edges from the source to ``v``."""
        edges: List[int] = []
        seen = set()
        while self.parent[v] is not None:
            if v in seen:
                raise ValueError(f"parent links cycle at vertex {v}")
            seen.add(v)
            e = self.parent[v]
            edges.append(e)
            v = tails[e]
        edges.reverse()
        return edges

    def to_dict(self, one_indexed: bool = True) -> Dict[str, Any]:
        shift = 1 if one_indexed else 0
        return {
            "verdict": "distances",
            "source": self.source + shift,
            "dist": [format_dist(x) for x in self.dist],
            "parent": [None if e is None else e + shift for e in self.parent],
        }


@dataclass(slots=True)
class NegativeCycle:
    vertices: Tuple[int, ...]
    edges: Tuple[int, ...]
    weight: int

    def to_dict(self, one_indexed: bool = True) -> Dict[str, Any]:
        shift = 1 if one_indexed else 0
        return {
            "verdict": "negative_cycle",
            "cycle": [v + shift for v in self.vertices],
            "edges": [e + shift for e in self.edges],
            "weight": self.weight,
        }


@dataclass(slots=True)
class VerifyReport:
    check: str
    ok: bool
    counterexample: Optional[Dict[str, Any]] = None
    measures: Dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check": self.check,
            "ok": self.ok,
            "counterexample": self.counterexample,
            "measures": self.measures,
        }


def ceil_log2(x: int) -> int:
    """Smallest L with 2**L >= x, for x >= 1."""
    if x < 1:
        raise ValueError(f"ceil_log2 needs x >= 1, got {x}")
    return (x - 1).bit_length()


def log_n(n: int) -> int:
    return ceil_log2(max(n, 2))
