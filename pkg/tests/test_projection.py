from __future__ import annotations

import pytest

from negpath.graph import Graph
from negpath.projection import Projection, ProjectionError, layer_projections
from negpath.validators import verify_path_covering, verify_projection

from .conftest import A, B, C, D


def _induced(g: Graph, vertices) -> Projection:
    order = sorted(vertices)
    local = {v: i for i, v in enumerate(order)}
    edges = [(local[u], local[v], w) for u, v, w in g.edges() if u in local and v in local]
    return Projection(g.n, order, edges, dict(local))


def test_layering_linked_pairs_parts(linked_pairs):
    parts = [
        _induced(linked_pairs, {A, B}),
        _induced(linked_pairs, {C, D}),
        _induced(linked_pairs, {A, B}),
        _induced(linked_pairs, {C}),
    ]
    p = layer_projections(linked_pairs, parts)
    assert p.carrier.n == 7
    assert list(p.pi) == [A, B, C, D, A, B, C]
    assert p.rep == {A: 0, B: 1, C: 2, D: 3}
    part = [0, 0, 1, 1, 2, 2, 3]
    cross = [(x, y) for x, y, _ in p.carrier.edges() if part[x] != part[y]]
    assert cross == [(1, 2)]
    assert p.carrier.m == 7
    assert verify_projection(p, linked_pairs).ok


def test_layering_single_part_is_unchanged(linked_pairs):
    part = _induced(linked_pairs, range(4))
    assert layer_projections(linked_pairs, [part]) is part


def test_layering_disjoint_parts_adds_no_edges():
    g = Graph(4, [(0, 1, 1), (2, 3, 1)])
    p = layer_projections(g, [_induced(g, {0, 1}), _induced(g, {2, 3})])
    assert p.carrier.m == 2


def test_layering_rejects_parts_over_another_base(linked_pairs):
    with pytest.raises(ProjectionError):
        layer_projections(linked_pairs, [Projection(3, [0], [], {0: 0})])


def test_projection_check_rejects_bad_rep():
    with pytest.raises(ProjectionError):
        Projection(2, [0, 1], [], {0: 1}).check()


def test_identity_projection_verifies(linked_pairs):
    p = Projection.identity(linked_pairs)
    assert verify_projection(p, linked_pairs).ok
    assert verify_path_covering(linked_pairs, p, 3).ok


def test_json_round_trip_keeps_structure(linked_pairs_cover):
    text = linked_pairs_cover.to_json()
    again = Projection.from_json(text)
    assert again.pi == linked_pairs_cover.pi
    assert again.rep == linked_pairs_cover.rep
    assert list(again.carrier.edges()) == list(linked_pairs_cover.carrier.edges())
    assert again.to_json() == text


def test_from_json_rejects_duplicate_representatives():
    doc = '{"base_n": 1, "nodes": [{"id": 0, "pi": 0, "rep": true}, {"id": 1, "pi": 0, "rep": true}], "edges": []}'
    with pytest.raises(ProjectionError):
        Projection.from_json(doc)


def test_with_weights_shares_structure(linked_pairs):
    p = layer_projections(linked_pairs, [_induced(linked_pairs, {A, B}), _induced(linked_pairs, {C, D})])
    q = p.with_weights([0] * p.carrier.m)
    assert q.pi is p.pi
    assert q.rep == p.rep and q.rep is not p.rep
    assert q.carrier.out_adj is p.carrier.out_adj
    assert q.origin == p.origin
    assert set(q.carrier.weights) == {0}


def test_with_weights_rejects_short_origin(linked_pairs):
    p = Projection.identity(linked_pairs)
    with pytest.raises(ProjectionError, match="origin"):
        p.with_weights(list(p.carrier.weights), origin=[None])


def test_layering_links_every_later_part():
    g = Graph(3, [(0, 1, 4), (0, 2, 5), (1, 2, 6)])
    p = layer_projections(g, [_induced(g, {0}), _induced(g, {1}), _induced(g, {2})])
    assert list(p.pi) == [0, 1, 2]
    assert sorted(p.carrier.edges()) == [(0, 1, 4), (0, 2, 5), (1, 2, 6)]
    assert verify_projection(p, g).ok
