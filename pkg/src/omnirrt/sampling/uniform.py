from __future__ import annotations

import numpy as np

__all__ = ["sample_uniform"]


def sample_uniform(space, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Coordinate-wise uniform draw(s) within the space's bounds."""
    shape = (space.dim,) if size is None else (size, space.dim)
    return space.lower + rng.random(shape) * (space.upper - space.lower)
