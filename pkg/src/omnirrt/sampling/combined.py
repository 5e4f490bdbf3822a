"""Intersection sampling and informed mixing."""
from __future__ import annotations

import numpy as np

from ..cspace import Path
from ..errors import SamplingExhaustedError
from .convex import Slice, slice_contains
from .local import LocalInformedSampler
from .spheroid import ProlateSpheroid, sample_in_bounds, sample_spheroid

__all__ = ["sample_combined", "sample_informed", "mix_with_informed"]


def sample_combined(P, s: Slice, c: int, rng: np.random.Generator, space=None,
                    max_attempts: int = 10_000, local: LocalInformedSampler | None = None):
    """Draw from the local spheroid union and keep the first draw inside the slice."""
    if local is None:
        lower = None if space is None else space.lower
        upper = None if space is None else space.upper
        local = LocalInformedSampler(P, c, lower, upper)
    for _ in range(max_attempts):
        q = local.sample(rng)
        if slice_contains(s, q):
            return q
    raise SamplingExhaustedError(f"no sample in the intersection after {max_attempts} draws")


def sample_informed(P, rng: np.random.Generator, space=None):
    """Uniform draw from the whole-path spheroid (foci at the path ends)."""
    P = P if isinstance(P, Path) else Path(P)
    e = ProlateSpheroid(P.start, P.end, float(P.segment_lengths().sum()))
    if space is None:
        return sample_spheroid(e, rng)
    return sample_in_bounds(lambda: sample_spheroid(e, rng), space.lower, space.upper)


def mix_with_informed(base_sampler, P, eps: float, rng: np.random.Generator, space=None):
    """With probability ``eps`` draw from the whole-path spheroid, else call ``base_sampler()``."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"mixing probability must be in [0, 1], got {eps}")
    if rng.random() < eps:
        return sample_informed(P, rng, space)
    return base_sampler()
