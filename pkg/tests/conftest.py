import pytest

from treecut import GeometricTree


@pytest.fixture
def t_l():
    """Right-angle path of two unit edges (corner at (1,0))."""
    return GeometricTree(
        {0: (0.0, 0.0), 1: (1.0, 0.0), 2: (1.0, 1.0)},
        [(0, 1), (1, 2)],
    )


@pytest.fixture
def t_hook():
    """Three legs of length 4 meeting at r=(4,0); a symmetric star."""
    return GeometricTree(
        {0: (0.0, 0.0),   # p0
         1: (4.0, 0.0),   # r
         2: (4.0, 4.0),   # q0
         3: (4.0, -4.0)},  # t
        [(0, 1), (1, 2), (1, 3)],
    )


@pytest.fixture
def t_forkbent():
    """Bent path x-m-b with a fork of two unit-diagonal leaves at b."""
    return GeometricTree(
        {0: (0.0, 0.0),   # x
         1: (2.0, 1.0),   # m
         2: (4.0, 0.0),   # b
         3: (5.0, 1.0),   # y1
         4: (5.0, -1.0)},  # y2
        [(0, 1), (1, 2), (2, 3), (2, 4)],
    )
