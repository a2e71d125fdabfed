"""Exact evaluation and diagnosis of an augmented tree T + pq.

Every point of T + pq lies on the tree or on the shortcut, and the
shortcut can appear at most once on a shortest path, so the diameter is
the maximum over (i) leaf pairs with the three route options (tree only,
via the shortcut in either orientation) and (ii) each leaf against the
antipodal of its cycle attachment point.  These candidates are exact;
pairs inside a single B-sub-tree are kept for the value but excluded
from the reported pair state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .diameter_core import BackboneDecomposition, backbone
from .tree_model import (
    GeometricTree,
    Shortcut,
    TreePoint,
    distances_from,
    euclidean_distance,
    network_distance,
)

USEFUL = "useful"
INDIFFERENT = "indifferent"
USELESS = "useless"

VIA_SHORTCUT = "via-shortcut"
VIA_TREE = "via-tree"
VIA_P = "via-p"
VIA_Q = "via-q"

_ROUTE_TOKEN = {VIA_SHORTCUT: "shortcut", VIA_TREE: "tree",
                VIA_P: "p", VIA_Q: "q"}

# Coarse pair types; "sub" is any B-sub-tree endpoint (wedge or antipodal).
PAIR_TYPES = ("x-y", "x-sub", "sub-y", "sub-sub", "sub-interior")


@dataclass(frozen=True)
class Usefulness:
    classification: str
    diameter_before: float
    diameter_after: float


@dataclass(frozen=True)
class OrderedUsefulness:
    """Whether the shortcut shortens the pair in either orientation."""

    forward: bool    # d(u,p) + |pq| + d(q,v) < d_T(u,v)
    backward: bool   # d(u,q) + |pq| + d(p,v) < d_T(u,v)

    @property
    def indifferent(self) -> bool:
        return not (self.forward or self.backward)


@dataclass(frozen=True)
class AchievingPair:
    end1: object              # leaf id, or descriptor dict for cycle points
    end2: object
    subtype: str              # e.g. "x-y", "x-wedge", "wedge-interior"
    pair_type: str            # coarse type, or "within-subtree"
    path_types: frozenset
    distance: float


@dataclass(frozen=True)
class AugmentedDiagnosis:
    diameter: float
    cycle_length: float
    achieving_pairs: tuple
    pair_state: frozenset
    path_state: frozenset


def _leaf_classes(tree, decomp):
    """Map each leaf to (class, group key); class in {x, y, wedge}."""
    classes = {}
    if decomp.is_point:
        cid = decomp.backbone_ids[0]
        # Branch key = first vertex after the center.
        branch = {}
        stack = [(nb, nb) for (nb, _) in tree.adj.get(cid, [])]
        while stack:
            w, key = stack.pop()
            if w in branch:
                continue
            branch[w] = key
            for (nb, _) in tree.adj[w]:
                if nb != cid and nb not in branch:
                    stack.append((nb, key))
        key_x = branch.get(decomp.x_leaf)
        key_y = branch.get(decomp.y_leaf)
        for lv in tree.leaves():
            if lv == cid:
                classes[lv] = ("x", "X")
                continue
            key = branch[lv]
            if key == key_x:
                classes[lv] = ("x", "X")
            elif key == key_y:
                classes[lv] = ("y", "Y")
            else:
                classes[lv] = ("wedge", ("S", key))
        return classes
    bset = set(decomp.backbone_ids)
    root_of = {v: v for v in bset}
    stack = list(bset)
    while stack:
        w = stack.pop()
        for (nb, _) in tree.adj[w]:
            if nb not in root_of:
                root_of[nb] = root_of[w]
                stack.append(nb)
    a_id, b_id = decomp.backbone_ids[0], decomp.backbone_ids[-1]
    for lv in tree.leaves():
        r = root_of[lv]
        if r == a_id:
            classes[lv] = ("x", "X")
        elif r == b_id:
            classes[lv] = ("y", "Y")
        else:
            classes[lv] = ("wedge", ("S", r))
    return classes


def _pair_type(c1, c2):
    pair = tuple(sorted((c1, c2)))
    if pair == ("x", "y"):
        return "x-y"
    if "x" in pair:
        return "x-sub"
    if "y" in pair:
        return "sub-y"
    return "sub-sub"


def _subtype(c1, c2):
    order = {"x": 0, "wedge": 1, "antipodal": 2, "interior": 3, "y": 4}
    a, b = sorted((c1, c2), key=lambda c: order[c])
    return f"{a}-{b}"


def augmented_diameter(tree: GeometricTree, decomp: BackboneDecomposition,
                       shortcut: Shortcut) -> AugmentedDiagnosis:
    """Exact continuous diameter of T + pq with full diagnosis."""
    tree.check_shortcut(shortcut)
    p, q = shortcut.p, shortcut.q
    e = euclidean_distance(tree, p, q)
    dtpq = network_distance(tree, p, q)
    cyc = e + dtpq
    half = cyc / 2.0
    tol = tree.tol
    leaves = tree.leaves()
    dp = distances_from(tree, p)
    dq = distances_from(tree, q)
    classes = _leaf_classes(tree, decomp)

    candidates = []  # (distance, kind, payload)
    leaf_dists = {u: distances_from(tree, TreePoint.at_vertex(u))
                  for u in leaves}
    for i, u in enumerate(leaves):
        du = leaf_dists[u]
        for v in leaves[i + 1:]:
            treed = du[v]
            via1 = dp[u] + e + dq[v]
            via2 = dq[u] + e + dp[v]
            candidates.append((min(treed, via1, via2), "pair",
                               (u, v, treed, min(via1, via2))))
        if cyc > 0.0:
            reach = (dp[u] + dq[u] - dtpq) / 2.0
            candidates.append((reach + half, "anti", (u,)))

    diameter = max(c[0] for c in candidates)
    achieving = []
    pair_state = set()
    path_state = set()
    for dist, kind, payload in candidates:
        if dist < diameter - tol:
            continue
        if kind == "pair":
            u, v, treed, via = payload
            routes = set()
            if treed <= dist + tol:
                routes.add(VIA_TREE)
            if via <= dist + tol:
                routes.add(VIA_SHORTCUT)
            (c1, g1), (c2, g2) = classes[u], classes[v]
            if g1 == g2:
                ptype = "within-subtree"
                sub = "within-subtree"
            else:
                ptype = _pair_type(c1, c2)
                sub = _subtype(c1, c2)
                pair_state.add(ptype)
                for r in routes:
                    path_state.add(_descriptor(c1, c2, r))
            achieving.append(AchievingPair(u, v, sub, ptype,
                                           frozenset(routes), dist))
        else:
            (u,) = payload
            # Locate the antipodal partner of u's cycle attachment point.
            tau = (dp[u] + dtpq - dq[u]) / 2.0
            pos = tau + half
            if pos > cyc:
                pos -= cyc
            on_tree = pos <= dtpq + tol
            c1, g1 = classes[u]
            c2 = "antipodal" if on_tree else "interior"
            routes = frozenset({VIA_TREE, VIA_SHORTCUT} if on_tree
                               else {VIA_P, VIA_Q})
            sub = _subtype(c1, c2)
            if c2 == "interior":
                ptype = "sub-interior" if c1 == "wedge" else f"{c1}-interior"
            else:
                ptype = _pair_type(c1, "wedge")
            pair_state.add(ptype)
            for r in routes:
                path_state.add(_descriptor(c1, c2, r))
            end2 = {"kind": c2, "cycle_position": pos}
            achieving.append(AchievingPair(u, end2, sub, ptype, routes, dist))

    achieving.sort(key=lambda ap: (str(ap.end1), str(ap.end2)))
    return AugmentedDiagnosis(diameter, cyc, tuple(achieving),
                              frozenset(pair_state), frozenset(path_state))


def _descriptor(c1, c2, route):
    token = {"x": "x", "y": "y", "wedge": "wedge",
             "antipodal": "antipodal", "interior": "interior"}
    order = {"x": 0, "wedge": 1, "antipodal": 2, "interior": 3, "y": 4}
    a, b = sorted((c1, c2), key=lambda c: order[c])
    return f"{token[a]}-{_ROUTE_TOKEN[route]}-{token[b]}"


def augmented_diameter_value(tree, shortcut, leaf_dists=None):
    """Diameter of T + pq without the diagnosis bookkeeping."""
    tree.check_shortcut(shortcut)
    p, q = shortcut.p, shortcut.q
    e = euclidean_distance(tree, p, q)
    dtpq = network_distance(tree, p, q)
    half = (e + dtpq) / 2.0
    leaves = tree.leaves()
    dp = distances_from(tree, p)
    dq = distances_from(tree, q)
    if leaf_dists is None:
        leaf_dists = {u: distances_from(tree, TreePoint.at_vertex(u))
                      for u in leaves}
    best = 0.0
    for i, u in enumerate(leaves):
        du = leaf_dists[u]
        for v in leaves[i + 1:]:
            val = min(du[v], dp[u] + e + dq[v], dq[u] + e + dp[v])
            if val > best:
                best = val
        val = (dp[u] + dq[u] - dtpq) / 2.0 + half
        if val > best:
            best = val
    return best


def classify_usefulness(tree: GeometricTree, shortcut: Shortcut,
                        decomp: BackboneDecomposition = None) -> Usefulness:
    if decomp is None:
        decomp = backbone(tree)
    after = augmented_diameter_value(tree, shortcut)
    before = decomp.diameter
    tol = tree.tol
    if after < before - tol:
        cls = USEFUL
    elif after > before + tol:
        cls = USELESS
    else:
        cls = INDIFFERENT
    return Usefulness(cls, before, after)


def has_useful_shortcut(decomp: BackboneDecomposition) -> bool:
    """A useful shortcut exists iff the backbone is bent."""
    return not decomp.is_point and not decomp.is_straight


def pair_is_useful(tree: GeometricTree, shortcut: Shortcut,
                   u: TreePoint, v: TreePoint) -> OrderedUsefulness:
    tree.check_shortcut(shortcut)
    p, q = shortcut.p, shortcut.q
    e = euclidean_distance(tree, p, q)
    duv = network_distance(tree, u, v)
    fwd = network_distance(tree, u, p) + e + network_distance(tree, q, v)
    bwd = network_distance(tree, u, q) + e + network_distance(tree, p, v)
    tol = tree.tol
    return OrderedUsefulness(fwd < duv - tol, bwd < duv - tol)
