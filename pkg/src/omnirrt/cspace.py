"""Configuration space, metric, paths and the start-goal axis projection.

Configurations are plain ``numpy`` vectors.  Angular coordinates are kept
flat (no wrap-around) and scaled by ``rotation_weight`` in the metric, so
the space is an ordinary Euclidean space after the per-axis scaling
returned by :meth:`ConfigSpace.weights`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DegenerateAxisError

__all__ = [
    "ConfigSpace",
    "Path",
    "AxisFrame",
    "metric_distance",
    "path_length",
    "transf",
    "transf_many",
    "build_axis_frame",
    "subpath",
]


@dataclass(frozen=True)
class ConfigSpace:
    """Bounded box of configurations with a weighted Euclidean metric.

    Parameters
    ----------
    lower, upper : array_like
        Per-dimension bounds.
    rotation_mask : array_like of bool, optional
        True for angular coordinates.  Defaults to all False.
    rotation_weight : float
        Scale applied to angular coordinates in the metric.
    """

    lower: np.ndarray
    upper: np.ndarray
    rotation_mask: np.ndarray = None
    rotation_weight: float = 1.0
    _weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float).ravel()
        upper = np.asarray(self.upper, dtype=float).ravel()
        if lower.shape != upper.shape or lower.size == 0:
            raise ContractError("lower and upper must be non-empty and of equal length")
        if not np.all(lower < upper):
            raise ContractError("every lower bound must be below its upper bound")
        if self.rotation_mask is None:
            mask = np.zeros(lower.size, dtype=bool)
        else:
            mask = np.asarray(self.rotation_mask, dtype=bool).ravel()
        if mask.size != lower.size:
            raise ContractError("rotation_mask length differs from dim")
        if mask.any() and not self.rotation_weight > 0:
            raise ContractError("rotation_weight must be positive when angular coordinates exist")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "rotation_mask", mask)
        w = np.where(mask, float(self.rotation_weight), 1.0)
        object.__setattr__(self, "_weights", w)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    def to_metric(self, q):
        """Map configurations to coordinates where the metric is plain Euclidean."""
        return np.asarray(q, dtype=float) * self._weights

    def from_metric(self, x):
        return np.asarray(x, dtype=float) / self._weights

    def metric_space(self) -> "ConfigSpace":
        """The same box expressed in metric coordinates (unit weights)."""
        return ConfigSpace(self.lower * self._weights, self.upper * self._weights)

    def contains(self, q, tol: float = 0.0) -> bool:
        q = np.asarray(q, dtype=float)
        return bool(np.all(q >= self.lower - tol) and np.all(q <= self.upper + tol))

    def volume(self) -> float:
        """Lebesgue measure of the box in metric coordinates."""
        return float(np.prod((self.upper - self.lower) * self._weights))


def _check_dims(q1, q2):
    if q1.shape != q2.shape:
        raise ContractError(f"dimension mismatch: {q1.shape} vs {q2.shape}")


def metric_distance(space: ConfigSpace | None, q1, q2) -> float:
    """Weighted Euclidean distance; ``space=None`` means unit weights."""
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    _check_dims(q1, q2)
    diff = q1 - q2
    if space is not None:
        if space.dim != diff.size:
            raise ContractError(f"configuration has {diff.size} coords, space has {space.dim}")
        diff = diff * space.weights
    return float(np.sqrt(diff @ diff))


class Path:
    """Ordered sequence of configurations stored as an ``(n, dim)`` array."""

    __slots__ = ("points",)

    def __init__(self, points):
        pts = np.array(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ContractError("a path needs at least one configuration")
        pts.setflags(write=False)
        self.points = pts

    def __len__(self):
        return self.points.shape[0]

    def __getitem__(self, i):
        return self.points[i]

    def __iter__(self):
        return iter(self.points)

    def __repr__(self):
        return f"Path(n={len(self)}, dim={self.dim})"

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def start(self):
        return self.points[0]

    @property
    def end(self):
        return self.points[-1]

    def segment_lengths(self, space: ConfigSpace | None = None) -> np.ndarray:
        diff = np.diff(self.points, axis=0)
        if space is not None:
            diff = diff * space.weights
        return np.sqrt(np.einsum("ij,ij->i", diff, diff))

    def cumulative_lengths(self, space: ConfigSpace | None = None) -> np.ndarray:
        """Length from the first point to every point (first entry 0)."""
        return np.concatenate(([0.0], np.cumsum(self.segment_lengths(space))))


def path_length(P, space: ConfigSpace | None = None) -> float:
    """Sum of distances between consecutive path elements."""
    if not isinstance(P, Path):
        P = Path(P)
    return float(P.segment_lengths(space).sum())


def subpath(P: Path, j: int, k: int) -> Path:
    """Points ``j..k`` inclusive (0-based), requiring ``0 <= j < k < n``."""
    n = len(P)
    if not (0 <= j < k < n):
        raise ContractError(f"subpath indices must satisfy 0 <= j < k < {n}, got ({j}, {k})")
    return Path(P.points[j:k + 1])


@dataclass(frozen=True)
class AxisFrame:
    """Coordinate frame of the start-goal axis.

    ``origin`` is the path point projection with the smallest scalar
    projection on ``direction``; ``extent`` is the spread of the projections.
    """

    origin: np.ndarray
    direction: np.ndarray
    extent: float

    @property
    def dim(self) -> int:
        return self.origin.size

    @property
    def terminal(self) -> np.ndarray:
        return self.origin + self.extent * self.direction

    def point_at(self, a: float, f: float = 0.0, r=None) -> np.ndarray:
        """Inverse of :func:`transf` for a chosen unit vector ``r`` normal to the axis."""
        q = self.origin + a * self.direction
        if f:
            q = q + f * np.asarray(r, dtype=float)
        return q


def build_axis_frame(P) -> AxisFrame:
    if not isinstance(P, Path):
        P = Path(P)
    pts = P.points
    axis = pts[-1] - pts[0]
    norm = np.sqrt(axis @ axis)
    if not norm > 0:
        raise DegenerateAxisError("path start and end coincide; SG-axis undefined")
    d = axis / norm
    s = (pts - pts[0]) @ d
    s_min, s_max = s.min(), s.max()
    origin = pts[0] + s_min * d
    return AxisFrame(origin=origin, direction=d, extent=float(s_max - s_min))


def transf(frame: AxisFrame, q) -> tuple[float, float]:
    """Distance along the SG-axis from ``origin`` and distance from the axis.

    The along-axis coordinate is signed: points projecting before ``origin``
    come out negative.
    """
    a, f = transf_many(frame, np.asarray(q, dtype=float)[None, :])
    return float(a[0]), float(f[0])


def transf_many(frame: AxisFrame, Q) -> tuple[np.ndarray, np.ndarray]:
    Q = np.asarray(Q, dtype=float)
    rel = Q - frame.origin
    a = rel @ frame.direction
    perp = rel - a[:, None] * frame.direction
    f = np.sqrt(np.einsum("ij,ij->i", perp, perp))
    return a, f
