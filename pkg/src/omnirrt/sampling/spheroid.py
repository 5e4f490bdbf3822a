"""Prolate hyperspheroid sets and direct uniform sampling from them."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InfeasibleSpheroidError, SamplingExhaustedError

__all__ = [
    "ProlateSpheroid",
    "sample_unit_ball",
    "sample_spheroid",
    "spheroid_contains",
    "sample_in_bounds",
    "make_rng",
]

# absolute slack tolerated when the transverse diameter undershoots the focal distance
_DIAMETER_SLACK = 1e-9


def make_rng(seed=None) -> np.random.Generator:
    """Deterministic generator; equal seeds give bitwise-equal streams."""
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class ProlateSpheroid:
    """Set of points whose summed distance to two foci is at most ``c_best``."""

    focus1: np.ndarray
    focus2: np.ndarray
    c_best: float

    def __post_init__(self):
        f1 = np.asarray(self.focus1, dtype=float)
        f2 = np.asarray(self.focus2, dtype=float)
        object.__setattr__(self, "focus1", f1)
        object.__setattr__(self, "focus2", f2)
        c_min = self.c_min
        if self.c_best < c_min:
            if self.c_best < c_min - _DIAMETER_SLACK * max(1.0, c_min):
                raise InfeasibleSpheroidError(
                    f"transverse diameter {self.c_best} below focal distance {c_min}")
            object.__setattr__(self, "c_best", c_min)
        else:
            object.__setattr__(self, "c_best", float(self.c_best))

    @property
    def dim(self) -> int:
        return self.focus1.size

    @property
    def c_min(self) -> float:
        diff = self.focus2 - self.focus1
        return float(np.sqrt(diff @ diff))

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.focus1 + self.focus2)

    @property
    def conjugate_diameter(self) -> float:
        c, c_min = self.c_best, self.c_min
        return float(np.sqrt(max((c - c_min) * (c + c_min), 0.0)))

    def volume(self) -> float:
        from scipy.special import gamma

        n = self.dim
        ball = np.pi ** (n / 2) / gamma(n / 2 + 1)
        return float(ball * (self.c_best / 2) * (self.conjugate_diameter / 2) ** (n - 1))


def sample_unit_ball(dim: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Uniform samples from the unit ``dim``-ball."""
    shape = (dim,) if size is None else (size, dim)
    x = rng.standard_normal(shape)
    norm = np.linalg.norm(x, axis=-1, keepdims=True)
    u = rng.random() if size is None else rng.random((size, 1))
    return x / norm * u ** (1.0 / dim)


def _orient(y, axis_dir):
    """Apply an orthogonal map sending e1 to ``axis_dir`` (Householder reflection)."""
    v = -axis_dir.copy()
    v[0] += 1.0
    vv = v @ v
    if vv < 1e-30:
        return y
    return y - np.multiply.outer(y @ v, v) * (2.0 / vv)


def sample_spheroid(e: ProlateSpheroid, rng: np.random.Generator, size: int | None = None):
    """Uniform sample(s) from the interior of a prolate hyperspheroid.

    A unit-ball sample is stretched to the spheroid radii, rotated so its
    first axis follows ``focus2 - focus1`` and shifted to the centre.
    """
    n = e.dim
    x = sample_unit_ball(n, rng, size)
    radii = np.full(n, 0.5 * e.conjugate_diameter)
    radii[0] = 0.5 * e.c_best
    y = x * radii
    c_min = e.c_min
    if c_min > 0:
        y = _orient(y, (e.focus2 - e.focus1) / c_min)
    return y + e.center


def spheroid_contains(e: ProlateSpheroid, q, tol: float = 1e-9):
    q = np.asarray(q, dtype=float)
    d1 = np.linalg.norm(q - e.focus1, axis=-1)
    d2 = np.linalg.norm(q - e.focus2, axis=-1)
    return d1 + d2 <= e.c_best + tol


def sample_in_bounds(draw, lower, upper, max_attempts: int = 100):
    """Call ``draw()`` until the result lies inside ``[lower, upper]``."""
    for _ in range(max_attempts):
        q = draw()
        if (q >= lower).all() and (q <= upper).all():
            return q
    raise SamplingExhaustedError(f"no in-bounds sample after {max_attempts} attempts")
