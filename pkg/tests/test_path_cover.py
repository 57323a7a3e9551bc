from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from negpath.generators import cycle_graph, random_graph
from negpath.graph import Graph
from negpath.models import Preset
from negpath.services.path_cover import (
    CoverStats,
    PathCoverError,
    PathCoverParams,
    ball_steps_bound_holds,
    build_middle_graph,
    degree_budget_holds,
    paper_cover_lambda,
    path_cover,
)
from negpath.validators import verify_clustered, verify_path_covering, verify_projection

from .conftest import digraphs


def _cover(g: Graph, d: int, lam: int = 16):
    return path_cover(g, PathCoverParams(d=d, lam=lam, n=g.n))


def test_single_vertex_is_its_own_cover():
    p, stats = _cover(Graph(1), 3)
    assert p.pi == (0,)
    assert p.rep == {0: 0}
    assert p.carrier.m == 0
    assert stats.nodes == 0


def test_single_vertex_keeps_its_loop():
    p, _ = _cover(Graph(1, [(0, 0, 2)]), 3)
    assert list(p.carrier.edges()) == [(0, 0, 2)]
    assert p.origin == (0,)


def test_cycle_takes_the_middle_graph_branch():
    g = cycle_graph(5)
    p, stats = _cover(g, 5)
    assert (stats.case1, stats.case2) == (0, 1)
    assert (stats.max_i_out, stats.max_i_in) == (2, 2)
    assert p.carrier.n == 5 and p.carrier.m == 5
    assert stats.diameter_bound == 8
    assert stats.growth == 1.0
    assert verify_clustered(p.carrier, stats.diameter_bound).ok


def test_linked_pairs_cover_is_valid(linked_pairs):
    p, stats = _cover(linked_pairs, 3)
    assert verify_projection(p, linked_pairs).ok
    assert verify_path_covering(linked_pairs, p, 3).ok
    assert verify_clustered(p.carrier, stats.diameter_bound).ok
    assert stats.size_bound_holds()


@given(digraphs(max_n=7, max_m=14, wmin=0, wmax=2), st.integers(0, 6), st.sampled_from([1, 4, 16]))
def test_cover_properties_on_small_graphs(g, d, lam):
    p, stats = _cover(g, d, lam)
    assert verify_projection(p, g).ok
    assert verify_path_covering(g, p, d).ok
    assert verify_clustered(p.carrier, stats.diameter_bound).ok
    assert stats.size_bound_holds()
    assert stats.carrier_n == p.carrier.n
    assert stats.sum_proj_deg == sum(g.deg_total[v] for v in p.pi)


@pytest.mark.parametrize("seed", range(4))
def test_cover_of_random_graph(seed):
    g = random_graph(40, 120, 0, 4, seed=seed)
    p, stats = _cover(g, 4)
    assert verify_projection(p, g).ok
    assert verify_path_covering(g, p, 4).ok
    assert verify_clustered(p.carrier, stats.diameter_bound).ok


def test_cover_is_deterministic():
    g = random_graph(30, 90, 0, 3, seed=11)
    first, first_stats = _cover(g, 3)
    again, again_stats = _cover(g, 3)
    assert first.to_json() == again.to_json()
    assert first_stats.to_dict() == again_stats.to_dict()


def test_cover_rejects_negative_weights():
    with pytest.raises(PathCoverError, match="truncate"):
        _cover(Graph(2, [(0, 1, -1)]), 1)


def test_cover_rejects_params_for_another_graph(linked_pairs):
    with pytest.raises(PathCoverError):
        path_cover(linked_pairs, PathCoverParams(d=1, lam=16, n=5))


def test_middle_graph_of_a_triangle():
    g = Graph(3, [(0, 1, 1), (1, 2, 1), (2, 0, 1)])
    mid = build_middle_graph(g, {0, 1, 2}, {0, 2}, {1: 0, 2: 1}, {2: 2})
    assert mid == {0, 1, 2}


def test_middle_graph_skips_branches_that_miss_the_intersection():
    g = Graph(3, [(0, 1, 1), (0, 2, 1), (1, 0, 1)])
    mid = build_middle_graph(g, {0, 1, 2}, {0, 1}, {1: 0, 2: 1}, {1: 2})
    assert mid == {0, 1}


def test_middle_graph_of_disjoint_balls_is_empty():
    g = Graph(2, [(0, 1, 1)])
    assert build_middle_graph(g, {0}, {1}, {}, {}) == set()


def test_middle_graph_needs_a_single_root():
    g = Graph(2, [(0, 1, 1)])
    with pytest.raises(PathCoverError, match="roots"):
        build_middle_graph(g, {0, 1}, {0, 1}, {}, {})


@pytest.mark.parametrize(
    "deg_ball, expected",
    [(70, True), (75, False), (80, False), (100, False)],
)
def test_shrink_test_is_strict(deg_ball, expected):
    params = PathCoverParams(d=1, lam=16, n=4)
    assert params.shrinks(deg_ball, 100) is expected


def test_paper_preset_enforces_lambda_floor():
    with pytest.raises(ValidationError):
        PathCoverParams(d=1, lam=16, n=4, preset=Preset.PAPER)
    params = PathCoverParams.for_graph(Graph(4), 1, preset=Preset.PAPER)
    assert params.lam == paper_cover_lambda(4) == 160000


def test_practical_lambda_comes_from_settings(monkeypatch):
    monkeypatch.setenv("NEGPATH_LAMBDA", "64")
    assert PathCoverParams.for_graph(Graph(4), 2).lam == 64


@pytest.mark.parametrize("sum_proj_deg, expected", [(2, True), (52, True), (53, False)])
def test_degree_budget(sum_proj_deg, expected):
    stats = CoverStats(base_n=2, base_m=1, sum_proj_deg=sum_proj_deg)
    assert degree_budget_holds(stats, 16) is expected


def test_ball_steps_bound():
    assert ball_steps_bound_holds(CoverStats(max_i_out=4, max_i_in=1), 16)
    assert not ball_steps_bound_holds(CoverStats(max_i_out=1, max_i_in=5), 16)


@pytest.mark.parametrize("n, d", [(16, 2), (16, 8), (64, 4), (256, 2), (256, 8)])
@pytest.mark.parametrize("seed", range(3))
def test_paper_preset_cover_meets_its_bounds(n, d, seed):
    g = random_graph(n, 2 * n, 0, 4, seed=seed)
    params = PathCoverParams.for_graph(g, d, preset=Preset.PAPER)
    assert params.lam == paper_cover_lambda(n)
    p, stats = path_cover(g, params)
    assert ball_steps_bound_holds(stats, params.lam)
    assert degree_budget_holds(stats, params.lam)
    assert stats.size_bound_holds()
    assert verify_projection(p, g).ok
    assert verify_clustered(p.carrier, stats.diameter_bound).ok
    if n <= 16:
        assert verify_path_covering(g, p, d).ok
