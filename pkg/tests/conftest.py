"""Shared fixtures and brute-force oracles for the test suite."""
import math

import numpy as np
import pytest

from omnirrt.sampling import slice_points

SQ2 = math.sqrt(2.0)

# 3D worked example: start (-3,0,0), goal (5,0,0)
WORKED_PATH = np.array([(-3, 0, 0), (0, -2, -2), (2, 2, 0), (3, 2, 2), (5, 0, 0)], dtype=float)
WORKED_VERTICES = np.array([(0, 0), (3, 2 * SQ2), (6, 2 * SQ2), (8, 0)], dtype=float)

# acceptance summary lines, filled in by test_acceptance.py
ACCEPTANCE_LINES = {}


@pytest.fixture
def worked_path():
    return WORKED_PATH.copy()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_path(rng, dim=None, n=None):
    """Random waypoints, sometimes with duplicated or collinear points."""
    dim = dim or int(rng.integers(2, 7))
    n = n or int(rng.integers(3, 51))
    P = rng.uniform(-10, 10, size=(n, dim))
    style = rng.integers(0, 4)
    if style == 1 and n > 3:
        # repeat some interior points
        idx = rng.integers(1, n - 1, size=n // 3)
        P[idx] = P[rng.integers(1, n - 1, size=idx.size)]
    elif style == 2:
        # snap to a coarse grid so ties and collinear triples appear
        P = np.round(P / 2.5) * 2.5
        if np.array_equal(P[0], P[-1]):
            P[-1, 0] += 2.5
    return P


def hull_vertices_oracle(pts, tol=0.0):
    """Strict convex-hull vertices of a 2D point set in O(m^3).

    An ordered pair ``(i, j)`` is a hull edge when every point lies on or to
    the left of the line ``i -> j``.  Strict vertices are the edge endpoints
    that do not sit strictly inside another hull edge.  Points within
    ``tol`` of a line count as on it.
    """
    P = np.unique(np.asarray(pts, dtype=float), axis=0)
    m = len(P)
    if m == 1:
        return P
    d = P[None, :, :] - P[:, None, :]  # d[i, j] = P[j] - P[i]
    # cross[i, j, k] = (P[j] - P[i]) x (P[k] - P[i])
    cross = d[:, :, None, 0] * d[:, None, :, 1] - d[:, :, None, 1] * d[:, None, :, 0]
    length = np.linalg.norm(d, axis=2)[:, :, None]
    on_line = np.abs(cross) <= tol * length
    edge = ((cross >= 0) | on_line).all(axis=2)
    np.fill_diagonal(edge, False)
    if not edge.any():
        # all points collinear: keep the two extremes
        order = np.lexsort((P[:, 1], P[:, 0]))
        return P[[order[0], order[-1]]]
    ei, ej = np.nonzero(edge)
    candidates = np.unique(np.concatenate((ei, ej)))
    keep = []
    for p in candidates:
        inner = False
        for i, j in zip(ei, ej):
            if p in (i, j) or not on_line[i, j, p]:
                continue
            t = np.dot(P[p] - P[i], d[i, j])
            if 0 < t < np.dot(d[i, j], d[i, j]):
                inner = True
                break
        if not inner:
            keep.append(p)
    return P[keep]


def slice_vertices_oracle(P):
    """Expected slice vertices of a path, in slice order."""
    _, pts = slice_points(P)
    V = hull_vertices_oracle(pts, tol=1e-12 * max(1.0, pts.max()))
    # same ordering as the slice: a ascending; f ascending at a=0, else descending
    order = np.lexsort((np.where(V[:, 0] == 0.0, V[:, 1], -V[:, 1]), V[:, 0]))
    return V[order]


def polygon_contains_oracle(V, a, f):
    """Half-plane test against the closed slice polygon (clockwise vertices)."""
    V = np.asarray(V, dtype=float)
    a = np.asarray(a, dtype=float)
    f = np.asarray(f, dtype=float)
    inside = (a >= 0) & (a <= V[-1, 0]) & (f >= 0)
    ring = np.vstack((V, V[:1]))
    for (pa, pf), (qa, qf) in zip(ring[:-1], ring[1:]):
        if pa == qa and pf == qf:
            continue
        cross = (qa - pa) * (f - pf) - (qf - pf) * (a - pa)
        inside &= cross <= 0
    return inside


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
