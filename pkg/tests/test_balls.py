from __future__ import annotations

from fractions import Fraction

import pytest

from negpath.graph import Graph
from negpath.models import Direction
from negpath.services.balls import BallGrower, grow_thin_layer
from negpath.services.sssp import ContractViolation

TENTH = Fraction(1, 10)


def _star(leaves: int = 5) -> Graph:
    return Graph(leaves + 1, [(0, v, 1) for v in range(1, leaves + 1)])


def test_star_stops_once_the_ball_stabilizes():
    g = _star()
    grower = grow_thin_layer(g, set(range(6)), 0, Direction.OUT, 1, TENTH).finish()
    assert grower.done
    assert grower.i == 2
    assert grower.inner == grower.outer == set(range(6))
    assert grower.outer_degree == 10


def test_isolated_center_stops_at_first_layer():
    g = Graph(3, [(1, 2, 1)])
    grower = BallGrower(g, {0, 1, 2}, 0, Direction.OUT, 4, TENTH).finish()
    assert grower.i == 1
    assert grower.inner == grower.outer == {0}


def test_zero_radius_is_zero_weight_closure():
    g = Graph(3, [(0, 1, 0), (1, 2, 3)])
    grower = BallGrower(g, {0, 1, 2}, 0, Direction.OUT, 0, TENTH).finish()
    assert grower.i == 1
    assert grower.outer == {0, 1}


def test_backward_growth_follows_in_edges():
    g = Graph(3, [(1, 0, 1), (2, 1, 1)])
    grower = BallGrower(g, {0, 1, 2}, 0, Direction.IN, 1, TENTH).finish()
    assert grower.dist == {0: 0, 1: 1, 2: 2}
    assert grower.parent == {1: 0, 2: 1}


def test_region_limits_the_ball():
    g = _star()
    grower = BallGrower(g, {0, 1, 2}, 0, Direction.OUT, 1, TENTH).finish()
    assert grower.outer == {0, 1, 2}


def test_every_step_spends_one_unit_and_settling_charges_degree():
    g = _star()
    grower = BallGrower(g, set(range(6)), 0, Direction.OUT, 1, TENTH)
    steps = 0
    while grower.step():
        steps += 1
        assert grower.consumed == steps
    assert grower.consumed == sum(g.deg_total)
    assert not grower.step()


def test_rejects_center_outside_region():
    with pytest.raises(ContractViolation):
        BallGrower(_star(), {1, 2}, 0, Direction.OUT, 1, TENTH)


def test_rejects_negative_weights():
    g = Graph(2, [(0, 1, -1)])
    with pytest.raises(ContractViolation):
        BallGrower(g, {0, 1}, 0, Direction.OUT, 1, TENTH).finish()
