"""Locally informed sampling: a union of spheroids over subpaths of the best path."""
from __future__ import annotations

import numpy as np

from ..cspace import Path
from ..errors import ContractError
from .spheroid import ProlateSpheroid, sample_in_bounds, sample_spheroid

__all__ = ["draw_subpath", "sample_local", "LocalInformedSampler", "local_contains"]


def draw_subpath(n: int, c: int, rng: np.random.Generator) -> tuple[int, int]:
    """Pick a subpath ``(j, k)`` (0-based, inclusive) of cardinality at least ``c``.

    The cardinality ``m`` is uniform on ``{c, ..., n}`` and the start index
    uniform over the ``n - m + 1`` admissible positions, so the whole path
    comes up with probability ``1 / (n - c + 1)``.  ``c > n`` degrades to
    the whole path.
    """
    if n < 2:
        raise ContractError("local sampling needs a path of at least two points")
    if c < 2:
        raise ContractError(f"cardinality parameter must be >= 2, got {c}")
    if c >= n:
        return 0, n - 1
    m = int(rng.integers(c, n + 1))
    j = int(rng.integers(0, n - m + 1))
    return j, j + m - 1


class LocalInformedSampler:
    """Draws from the union of subpath spheroids of a fixed path.

    Cumulative lengths are cached so each draw is O(dim).
    """

    def __init__(self, path, c: int, lower=None, upper=None):
        self.path = path if isinstance(path, Path) else Path(path)
        if len(self.path) < 2:
            raise ContractError("local sampling needs a path of at least two points")
        self.c = int(c)
        if self.c < 2:
            raise ContractError(f"cardinality parameter must be >= 2, got {c}")
        self.cum = self.path.cumulative_lengths()
        self.lower = None if lower is None else np.asarray(lower, dtype=float)
        self.upper = None if upper is None else np.asarray(upper, dtype=float)
        self.last_subpath = None

    def spheroid(self, j: int, k: int) -> ProlateSpheroid:
        pts = self.path.points
        return ProlateSpheroid(pts[j], pts[k], self.cum[k] - self.cum[j])

    def _draw(self, rng):
        j, k = draw_subpath(len(self.path), self.c, rng)
        self.last_subpath = (j, k)
        return sample_spheroid(self.spheroid(j, k), rng)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        if self.lower is None:
            return self._draw(rng)
        return sample_in_bounds(lambda: self._draw(rng), self.lower, self.upper)


def sample_local(P, c: int, rng: np.random.Generator, lower=None, upper=None) -> np.ndarray:
    return LocalInformedSampler(P, c, lower, upper).sample(rng)


def local_contains(P, c: int, q, tol: float = 1e-9):
    """Whether ``q`` lies in some subpath spheroid of cardinality >= ``c``.

    Scans every admissible ``(j, k)`` pair; meant for verification.
    """
    P = P if isinstance(P, Path) else Path(P)
    n = len(P)
    c = min(c, n)
    cum = P.cumulative_lengths()
    q = np.atleast_2d(np.asarray(q, dtype=float))
    dist = np.linalg.norm(q[:, None, :] - P.points[None, :, :], axis=-1)
    inside = np.zeros(q.shape[0], dtype=bool)
    for j in range(n):
        for k in range(j + c - 1, n):
            e = ProlateSpheroid(P.points[j], P.points[k], cum[k] - cum[j])
            inside |= dist[:, j] + dist[:, k] <= e.c_best + tol
    return inside
