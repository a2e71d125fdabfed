import math
import random

import pytest

from treecut import (
    EmptyMatrix,
    ImplicitMatrix,
    Shortcut,
    backbone,
    longest_wedge_path,
    row_maxima,
)
from treecut.caterpillar import Caterpillar
from treecut.oracle import random_tree
from treecut.smawk import wedge_path_on_arcs


def brute_row_maxima(entry, rows, cols):
    """Leftmost maximizing column per row, by exhaustive scan."""
    out = []
    for i in range(rows):
        best, arg = -math.inf, 0
        for j in range(cols):
            v = entry(i, j)
            if v > best:
                best, arg = v, j
        out.append((arg, best))
    return out


def monge_entry(rng, rows, cols):
    """Random inverse-Monge matrix: -(x_i - y_j)^2 plus rank-one terms."""
    xs = sorted(rng.uniform(0, 10) for _ in range(rows))
    ys = sorted(rng.uniform(0, 10) for _ in range(cols))
    r = [rng.uniform(-5, 5) for _ in range(rows)]
    c = [rng.uniform(-5, 5) for _ in range(cols)]

    def entry(i, j):
        return -(xs[i] - ys[j]) ** 2 + r[i] + c[j]

    return entry


def test_row_maxima_matches_exhaustive():
    rng = random.Random(42)
    for _ in range(200):
        rows = rng.randrange(1, 51)
        cols = rng.randrange(1, 51)
        entry = monge_entry(rng, rows, cols)
        m = ImplicitMatrix(rows, cols, entry)
        assert row_maxima(m) == brute_row_maxima(entry, rows, cols)


def test_row_maxima_tie_breaks_leftmost():
    m = ImplicitMatrix(3, 4, lambda i, j: 1.0)
    assert [c for c, _ in row_maxima(m)] == [0, 0, 0]


def test_row_maxima_single_cell():
    m = ImplicitMatrix(1, 1, lambda i, j: 7.0)
    assert row_maxima(m) == [(0, 7.0)]


def test_row_maxima_rejects_empty():
    with pytest.raises(EmptyMatrix):
        row_maxima(ImplicitMatrix(0, 3, lambda i, j: 0.0))


def brute_wedge(t, h, e, alpha, beta):
    """O(k^2) longest pendant-to-pendant path through the shortcut.

    Pendant i enters the shortcut at arc alpha and pendant j leaves it at
    arc beta; the pair qualifies when that route beats the tree path.
    Returns (length, (i, j)) or None.
    """
    best = None
    k = len(t)
    for i in range(k):
        ci = abs(t[i] - alpha)
        for j in range(k):
            if i == j:
                continue
            cj = abs(t[j] - beta)
            if ci + e + cj < abs(t[j] - t[i]):
                v = h[i] + ci + e + cj + h[j]
                if best is None or v > best[0]:
                    best = (v, (i, j))
    return best


def test_wedge_path_on_arcs_matches_brute():
    rng = random.Random(3)
    nonempty = 0
    for _ in range(100):
        k = rng.randrange(2, 25)
        length = 10.0
        t = sorted(rng.uniform(0, length) for _ in range(k))
        h = [rng.uniform(0, 2.5) for _ in range(k)]
        alpha = rng.uniform(0, length / 2)
        beta = rng.uniform(alpha, length)
        e = rng.uniform(0, beta - alpha)
        got = wedge_path_on_arcs(t, h, e, alpha, beta)
        want = brute_wedge(t, h, e, alpha, beta)
        if want is None:
            assert got is None
        else:
            nonempty += 1
            assert got is not None
            assert got[0] == pytest.approx(want[0], abs=1e-9)
    assert nonempty >= 20


def test_longest_wedge_path_matches_arc_version():
    count = 0
    rng = random.Random(17)
    for seed in range(40):
        tree = random_tree(seed, 13, "caterpillar")
        d = backbone(tree)
        if d.is_point or len(d.secondary) < 2:
            continue
        sec = sorted(d.secondary, key=lambda s: s.arc)
        alpha = rng.uniform(0, d.center_arc)
        beta = rng.uniform(d.center_arc, d.length)
        cat = Caterpillar(tree, d)
        p = cat.arc_to_treepoint(alpha)
        q = cat.arc_to_treepoint(beta)
        e = cat.chord(alpha, beta)
        got = longest_wedge_path(tree, d, Shortcut(p, q))
        want = brute_wedge([s.arc for s in sec], [s.height for s in sec],
                           e, alpha, beta)
        if want is None:
            assert got is None
        else:
            assert got is not None
            assert got[0] == pytest.approx(want[0], abs=1e-9)
            i, j = want[1]
            assert got[1] == (sec[i].far_leaf, sec[j].far_leaf)
        count += 1
    assert count >= 10
