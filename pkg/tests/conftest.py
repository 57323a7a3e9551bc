from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from negpath.config import load_settings
from negpath.graph import Graph
from negpath.projection import Projection

settings.register_profile(
    "negpath",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)
settings.load_profile("negpath")

A, B, C, D = 0, 1, 2, 3

# a<->b, c<->d, b->c, d->a with unit weights
LINKED_PAIRS_EDGES = [(A, B, 1), (B, A, 1), (C, D, 1), (D, C, 1), (B, C, 1), (D, A, 1)]


@pytest.fixture(autouse=True)
def reset_settings_cache():
    load_settings.cache_clear()
    yield
    load_settings.cache_clear()


@pytest.fixture
def linked_pairs() -> Graph:
    return Graph(4, LINKED_PAIRS_EDGES)


@pytest.fixture
def linked_pairs_cover() -> Projection:
    """Hand-built 1-clustered carrier a', b', c', d', a'', b'', c'' covering every 3-path."""
    a1, b1, c1, d1, a2, b2, c2 = range(7)
    pi = [A, B, C, D, A, B, C]
    edges = [
        (a1, b1, 1),
        (c1, d1, 1),
        (d1, c1, 1),
        (a2, b2, 1),
        (b2, a2, 1),
        (b1, c1, 1),
        (d1, a2, 1),
        (b2, c2, 1),
    ]
    return Projection(4, pi, edges, {A: a1, B: b1, C: c1, D: d1})


@st.composite
def digraphs(draw, max_n=8, max_m=20, wmin=0, wmax=2, min_n=1):
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    m = draw(st.integers(min_value=0, max_value=max_m))
    edges = draw(
        st.lists(
            st.tuples(
                st.integers(0, n - 1), st.integers(0, n - 1), st.integers(wmin, wmax)
            ),
            min_size=m,
            max_size=m,
        )
    )
    return Graph(n, edges)
