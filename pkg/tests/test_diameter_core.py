import math

import pytest

from treecut import (
    absolute_center,
    backbone,
    continuous_diameter,
    point_coordinates,
)
from treecut.oracle import dense_sample_diameter, random_tree


def test_diameter_l(t_l):
    res = continuous_diameter(t_l)
    assert res.diameter == pytest.approx(2.0)
    assert set(res.diametral_leaf_pairs) == {(0, 2)}


def test_diameter_hook(t_hook):
    res = continuous_diameter(t_hook)
    assert res.diameter == pytest.approx(8.0)
    assert set(res.diametral_leaf_pairs) == {(0, 2), (0, 3), (2, 3)}


def test_diameter_forkbent(t_forkbent):
    res = continuous_diameter(t_forkbent)
    assert res.diameter == pytest.approx(2 * math.sqrt(5) + math.sqrt(2))
    assert set(res.diametral_leaf_pairs) == {(0, 3), (0, 4)}


def test_center_l(t_l):
    res = absolute_center(t_l)
    assert point_coordinates(t_l, res.center) == pytest.approx((1.0, 0.0))
    assert res.eccentricity == pytest.approx(1.0)


def test_center_hook(t_hook):
    res = absolute_center(t_hook)
    assert res.center.is_vertex and res.center.vertex_id() == 1
    assert res.eccentricity == pytest.approx(4.0)


def test_center_forkbent(t_forkbent):
    res = absolute_center(t_forkbent)
    diam = 2 * math.sqrt(5) + math.sqrt(2)
    assert res.eccentricity == pytest.approx(diam / 2.0)
    # center on edge m-b at half the diameter from x
    p = res.center.canonical()
    assert {p.u, p.v} == {1, 2}


def test_backbone_l(t_l):
    d = backbone(t_l)
    assert not d.is_point and not d.is_straight
    assert d.length == pytest.approx(2.0)
    assert d.secondary == ()
    assert d.delta == pytest.approx(0.0)
    assert d.h_x == pytest.approx(0.0)
    assert d.h_y == pytest.approx(0.0)


def test_backbone_hook_is_point(t_hook):
    d = backbone(t_hook)
    assert d.is_point
    assert d.a.vertex_id() == d.b.vertex_id() == 1


def test_backbone_forkbent(t_forkbent):
    d = backbone(t_forkbent)
    assert {d.a_id, d.b_id} == {0, 2}
    assert d.secondary == ()
    # the fork at b forms the Y-side sub-tree of height sqrt(2)
    assert max(d.h_x, d.h_y) == pytest.approx(math.sqrt(2))
    assert min(d.h_x, d.h_y) == pytest.approx(0.0)
    assert not d.is_straight
    assert d.length == pytest.approx(2 * math.sqrt(5))


def test_backbone_straight_line():
    from treecut import GeometricTree
    t = GeometricTree({0: (0.0, 0.0), 1: (1.0, 0.0), 2: (2.0, 0.0)},
                      [(0, 1), (1, 2)])
    d = backbone(t)
    assert d.is_straight and not d.is_point


def test_backbone_arc_positions_sorted():
    for seed in range(5):
        t = random_tree(seed, 12, "caterpillar")
        d = backbone(t)
        assert list(d.arcs) == sorted(d.arcs)
        assert d.arcs[0] == pytest.approx(0.0)
        assert d.arcs[-1] == pytest.approx(d.length)
        for s in d.secondary:
            assert 0.0 < s.arc < d.length
            assert s.height > 0.0
            assert s.diameter <= d.delta + 1e-12
        assert d.center_arc == pytest.approx(d.diameter / 2.0 - d.h_x)


def test_diameter_matches_dense_oracle():
    for seed in range(8):
        t = random_tree(seed, 10, "uniform")
        res = continuous_diameter(t)
        approx, spacing = dense_sample_diameter(t)
        assert abs(res.diameter - approx) <= 3 * spacing


def test_secondary_subtrees_present():
    t = random_tree(7, 14, "caterpillar")
    d = backbone(t)
    assert len(d.secondary) >= 1
    assert d.h_max_secondary == pytest.approx(
        max(s.height for s in d.secondary))
