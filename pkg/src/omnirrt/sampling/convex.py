"""Convex hull-of-revolution sampling space.

The hull of the best path revolved around the start-goal axis is
represented by its 2D slice in ``(a, f)`` coordinates: distance along the
axis and distance from it.  Only the upper chain of the slice is stored,
since the lower edge is always the axis segment ``o``-``t``.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from ..cspace import AxisFrame, Path, build_axis_frame, transf, transf_many
from ..errors import ContractError, SamplingExhaustedError, UnsupportedDimensionError
from .spheroid import sample_in_bounds

__all__ = [
    "Slice",
    "slice_points",
    "inside_hull",
    "build_slice",
    "f_max_at",
    "slice_contains",
    "slice_contains_many",
    "random_perpendicular",
    "sample_axial",
    "sample_convex_direct",
    "sample_convex_rejection",
    "RejectionStats",
]

# slice coordinates this close to the axis or to its ends (relative to the extent) are snapped
_AXIS_SNAP = 1e-12


@dataclass(frozen=True)
class Slice:
    """Upper chain of the slice polygon plus the axis frame it lives in.

    ``vertices`` runs from ``(0, 0)`` to ``(extent, 0)``; a-values are
    non-decreasing and can only repeat on a vertical edge at either end.
    """

    frame: AxisFrame
    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        object.__setattr__(self, "vertices", v)
        a, f = v[:, 0], v[:, 1]
        lo, hi = 0, len(v)
        if len(v) > 2 and a[1] == a[0]:
            lo = 1
        if len(v) > 2 and a[-2] == a[-1]:
            hi -= 1
        object.__setattr__(self, "_pa", a[lo:hi].copy())
        object.__setattr__(self, "_pf", f[lo:hi].copy())
        object.__setattr__(self, "_mass_cache", {})

    def cumulative_mass(self, power: int = 1) -> np.ndarray:
        """Running mass of ``f_max ** power`` over the profile segments."""
        cached = self._mass_cache.get(power)
        if cached is None:
            cached = np.cumsum(_segment_masses(self._pa, self._pf, power))
            self._mass_cache[power] = cached
        return cached

    @property
    def extent(self) -> float:
        return self.frame.extent

    @property
    def profile(self) -> tuple[np.ndarray, np.ndarray]:
        """Upper chain as a function ``a -> f_max`` with strictly increasing a."""
        return self._pa, self._pf

    def area(self) -> float:
        pa, pf = self.profile
        return float(np.sum(0.5 * (pf[1:] + pf[:-1]) * np.diff(pa)))

    def volume(self) -> float:
        """Volume of the hull of revolution (requires the frame dimension)."""
        from scipy import integrate
        from scipy.special import gamma

        n = self.frame.dim
        if n == 1:
            return self.extent
        ball = np.pi ** ((n - 1) / 2) / gamma((n - 1) / 2 + 1)
        pa, pf = self.profile
        total = 0.0
        for i in range(len(pa) - 1):
            total += integrate.quad(
                lambda x: np.interp(x, pa, pf) ** (n - 1), pa[i], pa[i + 1])[0]
        return float(ball * total)


def slice_points(P) -> tuple[AxisFrame, np.ndarray]:
    """Frame of ``P`` and the transformed point set ``transf(P + {o, t})``.

    Along-axis values are taken from the scalar projections directly, so the
    extreme path points land exactly on ``0`` and ``extent``.
    """
    P = P if isinstance(P, Path) else Path(P)
    frame = build_axis_frame(P)
    pts = P.points
    s = (pts - pts[0]) @ frame.direction
    a = s - s.min()
    snap = _AXIS_SNAP * max(1.0, frame.extent)
    a = np.where(a <= snap, 0.0, np.where(a >= frame.extent - snap, frame.extent, a))
    _, f = transf_many(frame, pts)
    f = np.where(f <= snap, 0.0, f)
    a = np.concatenate(([0.0, frame.extent], a))
    f = np.concatenate(([0.0, 0.0], f))
    return frame, np.column_stack((a, f))


def inside_hull(v_p, v_query, v_f, tol: float = 0.0) -> bool:
    """Whether ``v_query`` lies between the axis and the chord ``v_p``-``v_f``.

    Boundary points count as inside; ``tol`` is a distance from the chord.
    """
    pa, pf = v_p
    qa, qf = v_query
    fa, ff = v_f
    if not (pa <= qa <= fa):
        raise ContractError(f"query a={qa} not within [{pa}, {fa}]")
    if qf < -tol:
        return False
    da = fa - pa
    if da == 0:
        return min(pf, ff) - tol <= qf <= max(pf, ff) + tol
    cross = da * (qf - pf) - (ff - pf) * (qa - pa)
    if tol:
        return cross <= tol * math.hypot(da, ff - pf)
    return cross <= 0.0


def _sorted_slice_points(pts):
    a, f = pts[:, 0], pts[:, 1]
    # ascending f on the vertical edge at a=0, descending everywhere else
    order = np.lexsort((np.where(a == 0.0, f, -f), a))
    return pts[order]


def _scan_stack(pts, tol):
    chain = []
    for p in pts:
        while len(chain) >= 2 and inside_hull(chain[-2], chain[-1], p, tol):
            chain.pop()
        chain.append(p)
    return chain


def _scan_restart(pts, tol):
    # literal variant: restart from the first triplet after every removal
    V = list(pts)
    i = 1
    while len(V) >= 3:
        if inside_hull(V[i - 1], V[i], V[i + 1], tol):
            del V[i]
            i = 1
            continue
        if i == len(V) - 2:
            break
        i += 1
    return V


def build_slice(P, method: str = "stack") -> Slice:
    """Extremal vertices of the slice of the path's hull of revolution.

    ``method="restart"`` runs the quadratic restart-after-removal scan; it
    returns the same vertices as the default single-pass stack scan.
    Points within rounding distance of a chord are treated as on it and
    dropped, so collinear runs keep only their ends.
    """
    frame, pts = slice_points(P)
    pts = _sorted_slice_points(pts)
    tol = _AXIS_SNAP * max(1.0, frame.extent, float(pts[:, 1].max()))
    if method == "stack":
        chain = _scan_stack(pts, tol)
    elif method == "restart":
        chain = _scan_restart(pts, tol)
    else:
        raise ValueError(f"unknown scan method {method!r}")
    return Slice(frame, np.array(chain, dtype=float))


def f_max_at(s: Slice, a: float) -> float:
    """Height of the slice's upper chain at axis position ``a``."""
    if not (0.0 <= a <= s.extent):
        raise ContractError(f"a={a} outside [0, {s.extent}]")
    pa, pf = s.profile
    return float(np.interp(a, pa, pf))


def slice_contains(s: Slice, q, tol: float = 1e-9) -> bool:
    a, f = transf(s.frame, q)
    if a < -tol or a > s.extent + tol:
        return False
    a = min(max(a, 0.0), s.extent)
    pa, pf = s.profile
    i = int(np.searchsorted(pa, a, side="right"))
    i = min(max(i, 1), len(pa) - 1)
    return inside_hull((pa[i - 1], pf[i - 1]), (a, f), (pa[i], pf[i]), tol)


def slice_contains_many(s: Slice, Q, tol: float = 1e-9) -> np.ndarray:
    a, f = transf_many(s.frame, Q)
    pa, pf = s.profile
    fmax = np.interp(np.clip(a, 0.0, s.extent), pa, pf)
    return (a >= -tol) & (a <= s.extent + tol) & (f <= fmax + tol)


def random_perpendicular(d, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Uniform random unit vector(s) orthogonal to the unit vector ``d``."""
    d = np.asarray(d, dtype=float)
    n = d.size
    if n < 2:
        raise UnsupportedDimensionError("no perpendicular direction exists in 1D")
    if size is None:
        while True:
            g = rng.standard_normal(n)
            g -= (g @ d) * d
            norm = np.sqrt(g @ g)
            if norm >= 1e-9:
                return g / norm
    g = rng.standard_normal((size, n))
    g -= np.outer(g @ d, d)
    norm = np.linalg.norm(g, axis=1)
    bad = norm < 1e-9
    while bad.any():
        g[bad] = rng.standard_normal((bad.sum(), n))
        g[bad] -= np.outer(g[bad] @ d, d)
        norm[bad] = np.linalg.norm(g[bad], axis=1)
        bad = norm < 1e-9
    return g / norm[:, None]


def _segment_masses(pa, pf, power):
    da = np.diff(pa)
    f0, f1 = pf[:-1], pf[1:]
    if power == 1:
        return 0.5 * (f0 + f1) * da
    k1 = power + 1
    df = f1 - f0
    flat = np.abs(df) <= 1e-12 * np.maximum(np.maximum(f0, f1), 1e-300)
    safe = np.where(flat, 1.0, df)
    return np.where(flat, da * f0 ** power, da * (f1 ** k1 - f0 ** k1) / (k1 * safe))


def sample_axial(s: Slice, rng: np.random.Generator, size: int | None = None,
                 power: int = 1):
    """Axis positions with density proportional to ``f_max(a) ** power``.

    Segments are picked by their exact mass and the CDF of the linear (or
    power-of-linear) profile is inverted inside the segment.
    """
    pa, pf = s.profile
    n = 1 if size is None else size
    cum = s.cumulative_mass(power)
    masses = np.diff(cum, prepend=0.0)
    total = cum[-1]
    if not total > 0:
        a = rng.random(n) * s.extent
        return a[0] if size is None else a
    seg = np.searchsorted(cum, rng.random(n) * total, side="right")
    seg = np.minimum(seg, len(masses) - 1)
    u = rng.random(n)
    da = pa[seg + 1] - pa[seg]
    f0, f1 = pf[seg], pf[seg + 1]
    if power == 1:
        slope = (f1 - f0) / da
        target = u * masses[seg]
        x = 2.0 * target / (f0 + np.sqrt(np.maximum(f0 * f0 + 2.0 * slope * target, 0.0)))
        # both endpoints at zero height cannot be selected; guard the 0/0 anyway
        x = np.where(f0 + f1 > 0, x, u * da)
    else:
        k1 = power + 1
        df = f1 - f0
        flat = np.abs(df) <= 1e-12 * np.maximum(np.maximum(f0, f1), 1e-300)
        level = (f0 ** k1 + u * (f1 ** k1 - f0 ** k1)) ** (1.0 / k1)
        x = np.where(flat, u * da, da * (level - f0) / np.where(flat, 1.0, df))
    a = pa[seg] + np.clip(x, 0.0, da)
    return a[0] if size is None else a


def _direct_single(s: Slice, rng):
    # scalar version of _direct_batch for the profile density
    frame = s.frame
    pa, pf = s.profile
    cum = s.cumulative_mass(1)
    total = cum[-1]
    if total > 0:
        i = min(bisect.bisect_right(cum, rng.random() * total), len(cum) - 1)
        f0, f1 = pf[i], pf[i + 1]
        da = pa[i + 1] - pa[i]
        target = rng.random() * (cum[i] - (cum[i - 1] if i else 0.0))
        slope = (f1 - f0) / da
        x = 2.0 * target / (f0 + math.sqrt(max(f0 * f0 + 2.0 * slope * target, 0.0)))
        a = pa[i] + min(max(x, 0.0), da)
        fmax = f0 + (f1 - f0) * ((a - pa[i]) / da)
    else:
        a = rng.random() * frame.extent
        fmax = 0.0
    f = fmax * rng.random()
    q = frame.origin + a * frame.direction
    if frame.dim >= 2:
        q = q + f * random_perpendicular(frame.direction, rng)
    return q


def _direct_batch(s: Slice, rng, size, density):
    frame = s.frame
    n = frame.dim
    volume = density == "volume"
    if density not in ("profile", "volume"):
        raise ValueError(f"unknown density {density!r}")
    power = n - 1 if volume else 1
    a = sample_axial(s, rng, size, power=max(power, 1))
    pa, pf = s.profile
    fmax = np.interp(a, pa, pf)
    u = rng.random(size)
    f = fmax * (u ** (1.0 / (n - 1)) if volume and n > 2 else u)
    if n >= 2:
        r = random_perpendicular(frame.direction, rng, size)
    else:
        r = np.zeros((size, n))
    return frame.origin + a[:, None] * frame.direction + f[:, None] * r


def sample_convex_direct(s: Slice, space=None, rng: np.random.Generator = None,
                         size: int | None = None, density: str = "profile",
                         max_attempts: int = 100):
    """Sample the hull of revolution through its slice.

    ``density="profile"`` draws the axis position weighted by ``f_max`` and
    the radius uniformly on ``[0, f_max]``; this is not volume-uniform for
    dim >= 3.  ``density="volume"`` weights by ``f_max ** (dim - 1)`` and
    draws the radius as ``f_max * u ** (1 / (dim - 1))``, which is.

    With ``space`` given, out-of-bounds draws are redrawn up to
    ``max_attempts`` times (single draws) or filtered out (batches).
    """
    if rng is None:
        raise ContractError("an rng is required")
    if size is not None:
        Q = _direct_batch(s, rng, size, density)
        if space is not None:
            keep = np.all((Q >= space.lower) & (Q <= space.upper), axis=1)
            Q = Q[keep]
        return Q

    if density == "profile":
        def draw():
            return _direct_single(s, rng)
    else:
        def draw():
            return _direct_batch(s, rng, 1, density)[0]

    if space is None:
        return draw()
    return sample_in_bounds(draw, space.lower, space.upper, max_attempts)


@dataclass
class RejectionStats:
    attempts: int = 0
    accepted: int = 0

    @property
    def acceptance_ratio(self) -> float:
        return self.accepted / self.attempts if self.attempts else float("nan")


def sample_convex_rejection(s: Slice, space, rng: np.random.Generator,
                            max_attempts: int = 10_000,
                            stats: RejectionStats | None = None) -> np.ndarray:
    """Uniform draws over the space's box, kept only when inside the slice."""
    lower, upper = space.lower, space.upper
    for _ in range(max_attempts):
        q = lower + rng.random(lower.size) * (upper - lower)
        if stats is not None:
            stats.attempts += 1
        if slice_contains(s, q, tol=0.0):
            if stats is not None:
                stats.accepted += 1
            return q
    raise SamplingExhaustedError(f"rejection sampling failed after {max_attempts} attempts")
