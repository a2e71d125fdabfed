import json
import math

import pytest

from treecut import (
    DuplicateVertexId,
    GeometricTree,
    InvalidEdgeReference,
    NotATree,
    ParseError,
    Shortcut,
    TreePoint,
    ZeroLengthEdge,
    distances_from,
    euclidean_distance,
    load_tree,
    network_distance,
    point_coordinates,
    tree_from_data,
    tree_path,
)
from treecut.tree_model import parse_tree_point, vertex_path


def test_point_coordinates_midpoint(t_l):
    assert point_coordinates(t_l, TreePoint(0, 1, 0.5)) == (0.5, 0.0)


def test_point_coordinates_quarter(t_hook):
    assert point_coordinates(t_hook, TreePoint(1, 2, 0.25)) == (4.0, 1.0)


def test_network_distance_through_corner(t_l):
    a = TreePoint.at_vertex(0)
    b = TreePoint.at_vertex(2)
    assert network_distance(t_l, a, b) == pytest.approx(2.0)


def test_network_distance_same_edge(t_l):
    p = TreePoint(0, 1, 0.5)
    q = TreePoint(1, 2, 0.5)
    assert network_distance(t_l, p, q) == pytest.approx(1.0)


def test_network_distance_hook_leaves(t_hook):
    assert network_distance(
        t_hook, TreePoint.at_vertex(2), TreePoint.at_vertex(3)
    ) == pytest.approx(8.0)


def test_euclidean_vs_network(t_hook):
    p0 = TreePoint.at_vertex(0)
    q0 = TreePoint.at_vertex(2)
    assert euclidean_distance(t_hook, p0, q0) == pytest.approx(4 * math.sqrt(2))
    assert network_distance(t_hook, p0, q0) == pytest.approx(8.0)


def test_distances_from_vertex(t_hook):
    d = distances_from(t_hook, TreePoint.at_vertex(1))
    assert d == {0: pytest.approx(4.0), 1: 0.0,
                 2: pytest.approx(4.0), 3: pytest.approx(4.0)}


def test_distances_from_forkbent(t_forkbent):
    d = distances_from(t_forkbent, TreePoint.at_vertex(0))
    s5 = math.sqrt(5)
    assert d[1] == pytest.approx(s5)
    assert d[2] == pytest.approx(2 * s5)
    assert d[3] == pytest.approx(2 * s5 + math.sqrt(2))
    assert d[4] == pytest.approx(2 * s5 + math.sqrt(2))


def test_tree_path_trace(t_l):
    trace = tree_path(t_l, TreePoint.at_vertex(0), TreePoint.at_vertex(2))
    assert trace.length == pytest.approx(2.0)


def test_vertex_path(t_forkbent):
    assert vertex_path(t_forkbent, 0, 3) == [0, 1, 2, 3]


def test_tree_point_canonical_endpoints():
    assert TreePoint(3, 7, 0.0).canonical().vertex_id() == 3
    assert TreePoint(3, 7, 1.0).canonical().vertex_id() == 7
    assert not TreePoint(3, 7, 0.25).is_vertex


def test_shortcut_degenerate():
    c = TreePoint(1, 2, 0.5)
    assert Shortcut(c, c).is_degenerate
    assert not Shortcut(c, TreePoint(1, 2, 0.6)).is_degenerate


def test_load_round_trip(t_forkbent):
    doc = json.dumps(t_forkbent.to_json_data())
    again = load_tree(doc)
    assert again.coords == t_forkbent.coords
    assert set(map(frozenset, again.edges)) == set(
        map(frozenset, t_forkbent.edges))


def test_reject_duplicate_vertex():
    with pytest.raises(DuplicateVertexId):
        tree_from_data({"vertices": [{"id": 0, "x": 0, "y": 0},
                                     {"id": 0, "x": 1, "y": 0}],
                        "edges": [[0, 0]]})


def test_reject_cycle():
    with pytest.raises(NotATree):
        GeometricTree({0: (0, 0), 1: (1, 0), 2: (0, 1)},
                      [(0, 1), (1, 2), (2, 0)])


def test_reject_disconnected():
    with pytest.raises(NotATree):
        GeometricTree({0: (0, 0), 1: (1, 0), 2: (5, 5), 3: (6, 5)},
                      [(0, 1), (2, 3)])


def test_reject_zero_length_edge():
    with pytest.raises(ZeroLengthEdge):
        GeometricTree({0: (0, 0), 1: (0, 0)}, [(0, 1)])


def test_reject_unknown_edge_endpoint():
    with pytest.raises(InvalidEdgeReference):
        GeometricTree({0: (0, 0), 1: (1, 0)}, [(0, 9)])


def test_reject_weighted_input():
    with pytest.raises(ParseError):
        tree_from_data({"vertices": [{"id": 0, "x": 0, "y": 0},
                                     {"id": 1, "x": 1, "y": 0}],
                        "edges": [{"u": 0, "v": 1, "weight": 3.0}]})


def test_reject_malformed_json():
    with pytest.raises(ParseError):
        load_tree("{not json")


def test_parse_tree_point_validates(t_l):
    p = parse_tree_point(t_l, {"edge": [0, 1], "lambda": 0.5})
    assert (p.u, p.v, p.lam) == (0, 1, 0.5)
    with pytest.raises(Exception):
        parse_tree_point(t_l, {"edge": [0, 2], "lambda": 0.5})


def test_leaves(t_hook):
    assert sorted(t_hook.leaves()) == [0, 2, 3]
