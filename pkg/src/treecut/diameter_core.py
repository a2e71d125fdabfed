"""Continuous diameter, absolute center, and backbone decomposition.

The backbone of a tree is the intersection of all diametral paths.  The
sub-trees hanging off the backbone (the B-sub-trees) are summarized by
their attachment arc, height, and diameter; this compressed caterpillar
view is what the shortcut search operates on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .tree_model import (
    GeometricTree,
    PathTrace,
    TreePoint,
    point_coordinates,
    vertex_path,
)

__all__ = [
    "DiameterResult",
    "CenterResult",
    "SecondaryTree",
    "BackboneDecomposition",
    "continuous_diameter",
    "absolute_center",
    "backbone",
]


@dataclass(frozen=True)
class DiameterResult:
    diameter: float
    diametral_leaf_pairs: tuple


@dataclass(frozen=True)
class CenterResult:
    center: TreePoint
    eccentricity: float


@dataclass(frozen=True)
class SecondaryTree:
    """A B-sub-tree rooted at an interior backbone vertex."""

    root_id: int
    arc: float
    height: float
    far_leaf: int
    diameter: float

    @property
    def root(self) -> TreePoint:
        return TreePoint.at_vertex(self.root_id)


@dataclass(frozen=True)
class BackboneDecomposition:
    a: TreePoint
    b: TreePoint
    backbone_path: PathTrace
    backbone_ids: tuple
    arcs: tuple  # arc position of each backbone vertex, from a
    length: float
    is_point: bool
    is_straight: bool
    center: TreePoint
    center_arc: float
    h_x: float
    h_y: float
    x_leaf: int
    y_leaf: int
    secondary: tuple
    delta: float
    h_max_secondary: float
    diameter: float

    @property
    def a_id(self) -> int:
        return self.a.vertex_id()

    @property
    def b_id(self) -> int:
        return self.b.vertex_id()


def _sweep(tree: GeometricTree, root: int):
    """Iterative BFS returning (distances, parents, visit order)."""
    dist = {root: 0.0}
    parent = {root: None}
    order = [root]
    stack = [root]
    while stack:
        w = stack.pop()
        for (nb, wlen) in tree.adj[w]:
            if nb not in dist:
                dist[nb] = dist[w] + wlen
                parent[nb] = w
                order.append(nb)
                stack.append(nb)
    return dist, parent, order


def _farthest(dist: dict) -> int:
    return max(dist, key=lambda v: (dist[v], -v))


def continuous_diameter(tree: GeometricTree) -> DiameterResult:
    """Largest network distance between any two points of the tree.

    For a tree this is attained at a pair of leaves; all attaining pairs
    (within tolerance) are reported.
    """
    if tree.n == 1:
        return DiameterResult(0.0, ())
    v0 = next(iter(tree.coords))
    d0, _, _ = _sweep(tree, v0)
    u1 = _farthest(d0)
    d1, _, _ = _sweep(tree, u1)
    u2 = _farthest(d1)
    d2, _, _ = _sweep(tree, u2)
    diam = d1[u2]
    tol = tree.tol
    # Eccentricity of any vertex is realized at one of the two sweep poles.
    cand = [v for v in tree.leaves() if max(d1[v], d2[v]) >= diam - tol]
    pairs = set()
    for u in cand:
        du, _, _ = _sweep(tree, u)
        for v in cand:
            if v > u and du[v] >= diam - tol:
                pairs.add((u, v))
    return DiameterResult(diam, tuple(sorted(pairs)))


def _locate_on_vertex_path(tree, path, target_arc):
    """TreePoint at arc-length target_arc along a vertex-id path.

    Positions within tolerance of a vertex snap onto it, so that centers
    of symmetric trees are recognized as vertex points.
    """
    acc = 0.0
    for u, v in zip(path, path[1:]):
        w = tree.edge_length[(u, v)]
        if acc + w >= target_arc - 1e-15 * max(1.0, tree.scale):
            if target_arc - acc <= tree.tol:
                return TreePoint.at_vertex(u)
            if acc + w - target_arc <= tree.tol:
                return TreePoint.at_vertex(v)
            lam = min(max((target_arc - acc) / w, 0.0), 1.0)
            return TreePoint(u, v, lam).canonical()
        acc += w
    return TreePoint.at_vertex(path[-1])


def absolute_center(tree: GeometricTree) -> CenterResult:
    """The unique point minimizing the largest network distance."""
    if tree.n == 1:
        vid = next(iter(tree.coords))
        return CenterResult(TreePoint.at_vertex(vid), 0.0)
    v0 = next(iter(tree.coords))
    d0, _, _ = _sweep(tree, v0)
    u1 = _farthest(d0)
    d1, _, _ = _sweep(tree, u1)
    u2 = _farthest(d1)
    diam = d1[u2]
    path = vertex_path(tree, u1, u2)
    c = _locate_on_vertex_path(tree, path, diam / 2.0)
    return CenterResult(c, diam / 2.0)


def _component_info(tree, start, blocked):
    """Vertex set of the component of `start` avoiding `blocked` vertices."""
    comp = {start}
    stack = [start]
    while stack:
        w = stack.pop()
        for (nb, _) in tree.adj[w]:
            if nb not in blocked and nb not in comp:
                comp.add(nb)
                stack.append(nb)
    return comp


def _hanging_subtree(tree, root, backbone_set):
    """Metrics of the union of non-backbone branches at a backbone vertex.

    Returns (height, far_leaf, diameter) measured from `root`; the
    sub-tree includes `root` itself.  Height 0 when nothing hangs there.
    """
    members = {root}
    dist = {root: 0.0}
    stack = [root]
    while stack:
        w = stack.pop()
        for (nb, wlen) in tree.adj[w]:
            if nb in backbone_set or nb in members:
                continue
            members.add(nb)
            dist[nb] = dist[w] + wlen
            stack.append(nb)
    far = max(dist, key=lambda v: (dist[v], -v))
    height = dist[far]
    if height == 0.0:
        return 0.0, root, 0.0
    # Double sweep restricted to the hanging sub-tree for its diameter.
    d1 = _restricted_sweep(tree, far, members)
    far2 = max(d1, key=lambda v: (d1[v], -v))
    return height, far, d1[far2]


def _restricted_sweep(tree, root, members):
    dist = {root: 0.0}
    stack = [root]
    while stack:
        w = stack.pop()
        for (nb, wlen) in tree.adj[w]:
            if nb in members and nb not in dist:
                dist[nb] = dist[w] + wlen
                stack.append(nb)
    return dist


def backbone(tree: GeometricTree) -> BackboneDecomposition:
    """Backbone endpoints, center, B-sub-trees, delta, and h-hat."""
    if tree.n == 1:
        vid = next(iter(tree.coords))
        p = TreePoint.at_vertex(vid)
        return BackboneDecomposition(
            a=p, b=p, backbone_path=PathTrace((p,), 0.0), backbone_ids=(vid,),
            arcs=(0.0,), length=0.0, is_point=True, is_straight=True,
            center=p, center_arc=0.0, h_x=0.0, h_y=0.0, x_leaf=vid, y_leaf=vid,
            secondary=(), delta=0.0, h_max_secondary=0.0, diameter=0.0)

    tol = tree.tol
    v0 = next(iter(tree.coords))
    d0, _, _ = _sweep(tree, v0)
    u1 = _farthest(d0)
    d1, _, _ = _sweep(tree, u1)
    u2 = _farthest(d1)
    d2, _, _ = _sweep(tree, u2)
    diam = d1[u2]
    ecc = {v: max(d1[v], d2[v]) for v in tree.coords}
    eleaves = [v for v in tree.leaves() if ecc[v] >= diam - tol]

    pole_path = vertex_path(tree, u1, u2)
    center = _locate_on_vertex_path(tree, pole_path, diam / 2.0)

    # Group the diametral leaves by the branch in which they leave c.
    if center.is_vertex:
        cid = center.vertex_id()
        side_roots = [nb for (nb, _) in tree.adj[cid]]
        blocked = {cid}
        branch_of = {}
        for sr in side_roots:
            comp = _component_info(tree, sr, blocked)
            for w in comp:
                branch_of[w] = sr
        groups = {}
        for lv in eleaves:
            groups.setdefault(branch_of[lv], []).append(lv)
    else:
        cu, cv = center.u, center.v
        comp_u = _component_info(tree, cu, {cv})
        groups = {}
        for lv in eleaves:
            groups.setdefault(cu if lv in comp_u else cv, []).append(lv)

    active = [g for g in groups.values() if g]
    if len(active) >= 3:
        # Three or more diametral directions: the intersection of all
        # diametral paths degenerates to the center, which is a vertex.
        cid = center.vertex_id()
        return _point_backbone(tree, cid, diam, eleaves, d1)

    # Exactly two directions; find the split vertex on each side.
    (root_a, leaves_a), (root_b, leaves_b) = sorted(
        ((r, g) for r, g in groups.items() if g), key=lambda it: it[0])
    a_id = _split_vertex(tree, center, root_a, leaves_a)
    b_id = _split_vertex(tree, center, root_b, leaves_b)

    # Orient so that the first diametral leaf found (u1) is on the a side.
    if u1 in set(leaves_b):
        a_id, b_id = b_id, a_id

    bpath = vertex_path(tree, a_id, b_id)
    backbone_set = set(bpath)
    arcs = [0.0]
    for u, v in zip(bpath, bpath[1:]):
        arcs.append(arcs[-1] + tree.edge_length[(u, v)])
    length = arcs[-1]

    h_x, x_leaf, diam_x = _hanging_subtree(tree, a_id, backbone_set - {a_id})
    h_y, y_leaf, diam_y = _hanging_subtree(tree, b_id, backbone_set - {b_id})
    secondary = []
    delta = max(diam_x, diam_y)
    h_hat = 0.0
    for vid, arc in zip(bpath[1:-1], arcs[1:-1]):
        h, far, sdiam = _hanging_subtree(tree, vid, backbone_set - {vid})
        if h > 0.0:
            secondary.append(SecondaryTree(vid, arc, h, far, sdiam))
            delta = max(delta, sdiam)
            h_hat = max(h_hat, h)

    center_arc = diam / 2.0 - h_x
    center_arc = min(max(center_arc, 0.0), length)
    cpoint = _locate_on_vertex_path(tree, bpath, center_arc)
    pa, pb = TreePoint.at_vertex(a_id), TreePoint.at_vertex(b_id)
    ax, ay = tree.coords[a_id]
    bx, by = tree.coords[b_id]
    straight = math.hypot(ax - bx, ay - by) >= length - tol
    trace = PathTrace(tuple(TreePoint.at_vertex(v) for v in bpath), length)
    return BackboneDecomposition(
        a=pa, b=pb, backbone_path=trace, backbone_ids=tuple(bpath),
        arcs=tuple(arcs), length=length, is_point=(a_id == b_id),
        is_straight=straight, center=cpoint, center_arc=center_arc,
        h_x=h_x, h_y=h_y, x_leaf=x_leaf, y_leaf=y_leaf,
        secondary=tuple(secondary), delta=delta, h_max_secondary=h_hat,
        diameter=diam)


def _split_vertex(tree, center, side_root, side_leaves):
    """Deepest vertex through which every diametral path of one side runs."""
    target = set(side_leaves)
    if center.is_vertex:
        blocked = {center.vertex_id()}
    else:
        blocked = {center.u if side_root == center.v else center.v}
    # Parent structure of the side component, rooted at side_root.
    parent = {side_root: None}
    order = [side_root]
    stack = [side_root]
    while stack:
        w = stack.pop()
        for (nb, _) in tree.adj[w]:
            if nb in blocked or nb in parent:
                continue
            parent[nb] = w
            order.append(nb)
            stack.append(nb)
    cnt = {v: (1 if v in target else 0) for v in parent}
    for w in reversed(order):
        if parent[w] is not None:
            cnt[parent[w]] += cnt[w]
    total = cnt[side_root]
    v = side_root
    while True:
        if v in target:
            return v
        heirs = [nb for (nb, _) in tree.adj[v]
                 if parent.get(nb) == v and cnt[nb] == total]
        if len(heirs) == 1 and (1 if v in target else 0) == 0:
            v = heirs[0]
        else:
            return v


def _point_backbone(tree, cid, diam, eleaves, d1):
    p = TreePoint.at_vertex(cid)
    backbone_set = set()
    # Each branch at the center is its own B-sub-tree.
    comps = []
    for (nb, wlen) in tree.adj[cid]:
        members = _component_info(tree, nb, {cid})
        dist = _restricted_sweep(tree, nb, members)
        for w in dist:
            dist[w] += wlen
        far = max(dist, key=lambda v: (dist[v], -v))
        dd = _restricted_sweep(tree, far, members)
        far2 = max(dd, key=lambda v: (dd[v], -v))
        comps.append((dist[far], far, dd[far2]))
    comps.sort(key=lambda c: (-c[0], c[1]))
    h_x, x_leaf, diam_x = comps[0]
    h_y, y_leaf, diam_y = comps[1] if len(comps) > 1 else (0.0, cid, 0.0)
    rest = comps[2:]
    secondary = tuple(SecondaryTree(cid, 0.0, h, far, sd) for (h, far, sd) in rest)
    delta = max([diam_x, diam_y] + [sd for (_, _, sd) in rest])
    h_hat = max([h for (h, _, _) in rest], default=0.0)
    return BackboneDecomposition(
        a=p, b=p, backbone_path=PathTrace((p,), 0.0), backbone_ids=(cid,),
        arcs=(0.0,), length=0.0, is_point=True, is_straight=True,
        center=p, center_arc=0.0, h_x=h_x, h_y=h_y, x_leaf=x_leaf,
        y_leaf=y_leaf, secondary=secondary, delta=delta,
        h_max_secondary=h_hat, diameter=diam)
