"""Sampler kinds and the post-solution sampling strategy used by the planner."""
from __future__ import annotations

import enum
import logging

import numpy as np

from ..cspace import ConfigSpace, Path
from ..errors import ContractError, SamplingExhaustedError
from .combined import sample_combined
from .convex import (RejectionStats, build_slice, sample_convex_direct,
                     sample_convex_rejection)
from .local import LocalInformedSampler
from .spheroid import ProlateSpheroid, sample_in_bounds, sample_spheroid, spheroid_contains
from .uniform import sample_uniform

__all__ = ["SamplerKind", "PathSampler"]

log = logging.getLogger(__name__)


class SamplerKind(enum.Enum):
    UNIFORM = "uniform"
    INFORMED = "informed"
    LOCAL_INFORMED = "pi"
    CONVEX = "c"
    LOCAL_CONVEX = "pic"

    @classmethod
    def parse(cls, name) -> "SamplerKind":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        aliases = {"rrt*": "uniform", "local_informed": "pi", "convex": "c",
                   "local_convex": "pic", "informed-rrt*": "informed"}
        key = aliases.get(key, key)
        for kind in cls:
            if kind.value == key:
                return kind
        raise ValueError(f"unknown sampler kind {name!r}")

    @property
    def label(self) -> str:
        return {"uniform": "RRT*", "informed": "Informed-RRT*", "pi": "PI-RRT*",
                "c": "C-RRT*", "pic": "PIC-RRT*"}[self.value]

    @property
    def uses_slice(self) -> bool:
        return self in (SamplerKind.CONVEX, SamplerKind.LOCAL_CONVEX)


class PathSampler:
    """Post-solution sampler bound to the current best path.

    All coordinates are metric coordinates (plain Euclidean).  The slice is
    only rebuilt on request, so it can lag the path between rebuilds.
    """

    def __init__(self, kind: SamplerKind, lower, upper, c: int = 5, eps: float = 1e-5,
                 convex_mode: str = "direct", density: str = "profile"):
        if c < 2:
            raise ContractError(f"c must be >= 2, got {c}")
        if not 0.0 <= eps <= 1.0:
            raise ContractError(f"eps must be within [0, 1], got {eps}")
        self.kind = SamplerKind.parse(kind)
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        self.box = ConfigSpace(self.lower, self.upper)
        self.c = c
        self.eps = eps
        self.convex_mode = convex_mode
        self.density = density
        self.path = None
        self.slice = None
        self.local = None
        self.informed = None
        self.rejection_stats = RejectionStats()
        self.fallbacks = 0
        self.last_source = None

    def set_path(self, path: Path, cost: float | None = None):
        self.path = path
        if cost is None:
            cost = float(path.segment_lengths().sum())
        self.informed = ProlateSpheroid(path.start, path.end, cost)
        # rejecting box draws is cheaper once the spheroid outgrows the box
        self._informed_by_box = self.informed.volume() >= self.box.volume()
        if self.kind in (SamplerKind.LOCAL_INFORMED, SamplerKind.LOCAL_CONVEX):
            self.local = LocalInformedSampler(path, self.c, self.lower, self.upper)

    def rebuild_slice(self):
        if self.path is not None and self.kind.uses_slice:
            self.slice = build_slice(self.path)

    def uniform(self, rng) -> np.ndarray:
        return sample_uniform(self.box, rng)

    def informed_sample(self, rng) -> np.ndarray:
        e = self.informed
        if self._informed_by_box:
            for _ in range(1000):
                q = self.uniform(rng)
                if spheroid_contains(e, q):
                    return q
            raise SamplingExhaustedError("no box draw landed inside the informed spheroid")
        return sample_in_bounds(lambda: sample_spheroid(e, rng), self.lower, self.upper)

    def sample(self, rng) -> np.ndarray:
        kind = self.kind
        if kind is SamplerKind.UNIFORM or self.path is None:
            self.last_source = "uniform"
            return self.uniform(rng)
        try:
            if kind is SamplerKind.INFORMED:
                self.last_source = "informed"
                return self.informed_sample(rng)
            if kind is SamplerKind.LOCAL_INFORMED:
                self.last_source = "local"
                return self.local.sample(rng)
            if self.eps and rng.random() < self.eps:
                self.last_source = "informed"
                return self.informed_sample(rng)
            box = self.box
            if kind is SamplerKind.CONVEX:
                self.last_source = "convex"
                if self.convex_mode == "rejection":
                    return sample_convex_rejection(self.slice, box, rng,
                                                   stats=self.rejection_stats)
                return sample_convex_direct(self.slice, box, rng, density=self.density)
            self.last_source = "combined"
            return sample_combined(self.path, self.slice, self.c, rng, local=self.local)
        except (SamplingExhaustedError, ContractError) as exc:
            self.fallbacks += 1
            log.debug("sampler %s fell back to informed sampling: %s", kind.value, exc)
            self.last_source = "fallback"
            try:
                return self.informed_sample(rng)
            except SamplingExhaustedError:
                return self.uniform(rng)
