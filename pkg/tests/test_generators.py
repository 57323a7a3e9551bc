from __future__ import annotations

import pytest

from negpath.generators import (
    GeneratorError,
    cycle_graph,
    dag_chain,
    planted_negative_cycle,
    random_graph,
    restricted_instance,
)
from negpath.models import NegativeCycle
from negpath.services.sssp import bellman_ford
from negpath.validators import verify_restricted


def test_random_graph_is_seeded_and_loop_free():
    g = random_graph(10, 40, -2, 7, seed=5)
    assert g == random_graph(10, 40, -2, 7, seed=5)
    assert g != random_graph(10, 40, -2, 7, seed=6)
    assert g.m == 40
    assert all(u != v and -2 <= w <= 7 for u, v, w in g.edges())


@pytest.mark.parametrize(
    "args",
    [(0, 1, 0, 1), (3, -1, 0, 1), (3, 2, 5, 1), (1, 1, 0, 1)],
)
def test_random_graph_rejects_bad_parameters(args):
    with pytest.raises(GeneratorError):
        random_graph(*args)


def test_cycle_graph():
    g = cycle_graph(5)
    assert list(g.edges()) == [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 0, 1)]
    assert list(cycle_graph(1, weight=3).edges()) == [(0, 0, 3)]
    with pytest.raises(GeneratorError):
        cycle_graph(0)


@pytest.mark.parametrize("seed", range(5))
def test_restricted_instances_pass_the_check(seed):
    inst = restricted_instance(15, 40, seed=seed)
    assert inst.source == 0
    assert verify_restricted(inst.graph, 0).ok
    assert min(inst.graph.weights) >= -1
    assert inst.graph == restricted_instance(15, 40, seed=seed).graph


def test_tiny_restricted_instance_is_a_star():
    inst = restricted_instance(2, 5)
    assert list(inst.graph.edges()) == [(0, 1, 0)]


def test_dag_chain_has_negative_bridges_but_no_cycle():
    inst = dag_chain(4, 5, seed=2)
    g = inst.graph
    assert g.n == 20
    assert sum(1 for w in g.weights if w == -3) == 3
    assert not isinstance(bellman_ford(g, inst.source), NegativeCycle)


def test_planted_ring_closes_with_weight_minus_one():
    g, ring = planted_negative_cycle(12, 20, 4, seed=1)
    assert ring[0] == 0 and len(set(ring)) == 4
    assert isinstance(bellman_ford(g, 0), NegativeCycle)
    with pytest.raises(GeneratorError):
        planted_negative_cycle(3, 2, 4)
