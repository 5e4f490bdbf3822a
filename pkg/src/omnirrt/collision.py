"""Box-world environments and validity checks for rigid box robots.

The robot is a rectangle (2D workspace) or cuboid (3D workspace); obstacles
are axis-aligned boxes.  Overlap is decided with the separating axis test
for an oriented box against an axis-aligned box, vectorised over poses and
obstacles.  Configurations are ``(x, y[, theta])`` in 2D and
``(x, y, z[, yaw, pitch, roll])`` in 3D (Z-Y-X Euler angles).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path as FsPath

import numpy as np

from .cspace import ConfigSpace
from .errors import ConfigurationError, ContractError

__all__ = [
    "Environment",
    "RobotPose",
    "pose_from_config",
    "is_free",
    "is_free_many",
    "segment_free",
    "in_goal",
    "load_environment",
    "bundled_environments",
]

_SAT_EPS = 1e-12


@dataclass(frozen=True)
class RobotPose:
    translation: np.ndarray
    rotation: np.ndarray  # rotation matrix


def _rotation_2d(theta):
    c, s = np.cos(theta), np.sin(theta)
    R = np.empty(np.shape(theta) + (2, 2))
    R[..., 0, 0], R[..., 0, 1] = c, -s
    R[..., 1, 0], R[..., 1, 1] = s, c
    return R


def _rotation_zyx(yaw, pitch, roll):
    cz, sz = np.cos(yaw), np.sin(yaw)
    cy, sy = np.cos(pitch), np.sin(pitch)
    cx, sx = np.cos(roll), np.sin(roll)
    R = np.empty(np.shape(yaw) + (3, 3))
    R[..., 0, 0] = cz * cy
    R[..., 0, 1] = cz * sy * sx - sz * cx
    R[..., 0, 2] = cz * sy * cx + sz * sx
    R[..., 1, 0] = sz * cy
    R[..., 1, 1] = sz * sy * sx + cz * cx
    R[..., 1, 2] = sz * sy * cx - cz * sx
    R[..., 2, 0] = -sy
    R[..., 2, 1] = cy * sx
    R[..., 2, 2] = cy * cx
    return R


@dataclass(frozen=True)
class Environment:
    """Workspace, obstacles, robot box, start configuration and goal box."""

    workspace_dim: int
    bounds_min: np.ndarray
    bounds_max: np.ndarray
    obstacles_min: np.ndarray
    obstacles_max: np.ndarray
    half_extents: np.ndarray
    rotatable: bool
    start: np.ndarray
    goal_min: np.ndarray
    goal_max: np.ndarray
    rotation_weight: float = None
    name: str = ""
    _centers: np.ndarray = field(init=False, repr=False, compare=False)
    _halves: np.ndarray = field(init=False, repr=False, compare=False)
    _space: ConfigSpace = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        w = self.workspace_dim
        if w not in (2, 3):
            raise ConfigurationError(f"workspace_dim must be 2 or 3, got {w}")
        arr = lambda x: np.asarray(x, dtype=float)
        for name in ("bounds_min", "bounds_max", "half_extents", "goal_min", "goal_max"):
            v = arr(getattr(self, name)).reshape(-1)
            if v.size != w:
                raise ConfigurationError(f"{name} must have {w} entries")
            object.__setattr__(self, name, v)
        omin = arr(self.obstacles_min).reshape(-1, w)
        omax = arr(self.obstacles_max).reshape(-1, w)
        if omin.shape != omax.shape:
            raise ConfigurationError("obstacle min/max lists differ in length")
        if np.any(omin >= omax):
            raise ConfigurationError("every obstacle needs min < max on each axis")
        object.__setattr__(self, "obstacles_min", omin)
        object.__setattr__(self, "obstacles_max", omax)
        object.__setattr__(self, "_centers", 0.5 * (omin + omax))
        object.__setattr__(self, "_halves", 0.5 * (omax - omin))
        if np.any(self.bounds_min >= self.bounds_max):
            raise ConfigurationError("workspace bounds need min < max")
        if np.any(self.goal_min > self.goal_max):
            raise ConfigurationError("goal box needs min <= max")
        if np.any(self.goal_min < self.bounds_min) or np.any(self.goal_max > self.bounds_max):
            raise ConfigurationError("goal box must lie within the workspace bounds")
        if self.rotation_weight is None:
            object.__setattr__(self, "rotation_weight",
                               float(np.linalg.norm(self.half_extents)))
        r = self.n_rotations
        lower = np.concatenate((self.bounds_min, np.full(r, -math.pi)))
        upper = np.concatenate((self.bounds_max, np.full(r, math.pi)))
        mask = np.concatenate((np.zeros(w, bool), np.ones(r, bool)))
        object.__setattr__(self, "_space", ConfigSpace(lower, upper, mask, self.rotation_weight))
        start = arr(self.start).reshape(-1)
        if start.size != self.config_dim:
            raise ConfigurationError(f"start must have {self.config_dim} coordinates")
        object.__setattr__(self, "start", start)
        if not is_free(self, start):
            raise ConfigurationError("start configuration is in collision or out of bounds")

    @property
    def n_rotations(self) -> int:
        if not self.rotatable:
            return 0
        return 1 if self.workspace_dim == 2 else 3

    @property
    def config_dim(self) -> int:
        return self.workspace_dim + self.n_rotations

    def config_space(self) -> ConfigSpace:
        """Translation bounds from the workspace, angles in [-pi, pi]."""
        return self._space

    def default_resolution(self) -> float:
        return float(self.half_extents.min()) / 4.0

    def goal_center(self) -> np.ndarray:
        return 0.5 * (self.goal_min + self.goal_max)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "workspace_dim": self.workspace_dim,
            "bounds": {"min": self.bounds_min.tolist(), "max": self.bounds_max.tolist()},
            "obstacles": [{"min": lo.tolist(), "max": hi.tolist()}
                          for lo, hi in zip(self.obstacles_min, self.obstacles_max)],
            "robot": {"half_extents": self.half_extents.tolist(), "rotatable": self.rotatable},
            "start": self.start.tolist(),
            "goal_box": {"min": self.goal_min.tolist(), "max": self.goal_max.tolist()},
            "rotation_weight": self.rotation_weight,
        }

    @classmethod
    def from_dict(cls, doc: dict, name: str = "") -> "Environment":
        try:
            obstacles = doc.get("obstacles", [])
            w = int(doc["workspace_dim"])
            return cls(
                workspace_dim=w,
                bounds_min=doc["bounds"]["min"],
                bounds_max=doc["bounds"]["max"],
                obstacles_min=[o["min"] for o in obstacles] or np.zeros((0, w)),
                obstacles_max=[o["max"] for o in obstacles] or np.zeros((0, w)),
                half_extents=doc["robot"]["half_extents"],
                rotatable=bool(doc["robot"].get("rotatable", False)),
                start=doc["start"],
                goal_min=doc["goal_box"]["min"],
                goal_max=doc["goal_box"]["max"],
                rotation_weight=doc.get("rotation_weight"),
                name=doc.get("name", name),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(f"malformed environment document: {exc!r}") from exc


def bundled_environments() -> list[str]:
    files = resources.files("omnirrt.data")
    return sorted(p.name for p in files.iterdir() if p.name.endswith(".json"))


def load_environment(source) -> Environment:
    """Load an environment from a JSON file path or a bundled file name."""
    if isinstance(source, dict):
        return Environment.from_dict(source)
    path = FsPath(source)
    if path.is_file():
        text = path.read_text()
    else:
        name = path.name if path.suffix else path.name + ".json"
        res = resources.files("omnirrt.data") / name
        if not res.is_file():
            raise ConfigurationError(f"environment file not found: {source}")
        text = res.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return Environment.from_dict(doc, name=path.stem)


def pose_from_config(env: Environment, q) -> RobotPose:
    q = np.asarray(q, dtype=float)
    t, R = _poses(env, q[None, :])
    return RobotPose(t[0], R[0])


def _poses(env, Q):
    w = env.workspace_dim
    t = Q[:, :w]
    if not env.rotatable:
        R = np.broadcast_to(np.eye(w), (Q.shape[0], w, w))
    elif w == 2:
        R = _rotation_2d(Q[:, 2])
    else:
        R = _rotation_zyx(Q[:, 3], Q[:, 4], Q[:, 5])
    return t, R


def is_free_many(env: Environment, Q) -> np.ndarray:
    """Validity of each configuration row of ``Q``.

    World axes are tested for every pose/obstacle pair first; the robot
    axes (and, in 3D, the nine cross-product axes) only for pairs that the
    world axes fail to separate.
    """
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if Q.shape[1] != env.config_dim:
        raise ContractError(f"configurations need {env.config_dim} coords, got {Q.shape[1]}")
    t, R = _poses(env, Q)
    h = env.half_extents
    absR = np.abs(R) + _SAT_EPS
    # world-axis half extents of the posed robot
    reach = absR @ h
    ok = (t - reach >= env.bounds_min).all(axis=1) & (t + reach <= env.bounds_max).all(axis=1)
    if env.obstacles_min.shape[0] == 0:
        return ok
    T = env._centers[None, :, :] - t[:, None, :]  # (K, M, w)
    touching = (np.abs(T) <= env._halves[None, :, :] + reach[:, None, :]).all(axis=2)
    k, m = np.nonzero(touching)
    if k.size == 0:
        return ok
    T, R, absR, e = T[k, m], R[k], absR[k], env._halves[m]
    # robot face normals: column j of R
    sep = (np.abs(np.einsum("pi,pij->pj", T, R))
           > h + np.einsum("pi,pij->pj", e, absR)).any(axis=1)
    if env.workspace_dim == 3:
        # cross products of world axis i and robot axis j
        for i in range(3):
            i1, i2 = (i + 1) % 3, (i + 2) % 3
            for j in range(3):
                j1, j2 = (j + 1) % 3, (j + 2) % 3
                lhs = np.abs(T[:, i2] * R[:, i1, j] - T[:, i1] * R[:, i2, j])
                ra = e[:, i1] * absR[:, i2, j] + e[:, i2] * absR[:, i1, j]
                rb = h[j1] * absR[:, i, j2] + h[j2] * absR[:, i, j1]
                sep |= lhs > ra + rb
    ok[k[~sep]] = False
    return ok


def is_free(env: Environment, q) -> bool:
    return bool(is_free_many(env, np.asarray(q, dtype=float)[None, :])[0])


def edge_steps(dist, resolution):
    """Number of sub-segments for an edge: the smallest power of two with
    spacing at most ``resolution``.

    Powers of two make the check points of a finer resolution a superset of
    those of a coarser one, so refining can only turn a pass into a fail.
    """
    n = np.maximum(np.ceil(np.asarray(dist, dtype=float) / resolution), 1.0)
    return np.ldexp(1.0, np.frexp(n - 1.0)[1]).astype(np.int64)


def interpolate(env: Environment, q1, q2, resolution: float) -> np.ndarray:
    """Configurations along ``q1 -> q2`` spaced at most ``resolution`` apart in the metric."""
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    space = env.config_space()
    diff = (q2 - q1) * space.weights
    steps = int(edge_steps(math.sqrt(diff @ diff), resolution))
    s = np.linspace(0.0, 1.0, steps + 1)
    return q1 + s[:, None] * (q2 - q1)


def segment_free(env: Environment, q1, q2, resolution: float | None = None) -> bool:
    if resolution is None:
        resolution = env.default_resolution()
    if not resolution > 0:
        raise ContractError("resolution must be positive")
    return bool(np.all(is_free_many(env, interpolate(env, q1, q2, resolution))))


def in_goal(env: Environment, q) -> bool:
    """Translation part of ``q`` inside the closed goal box."""
    x = np.asarray(q, dtype=float)[: env.workspace_dim]
    return bool(np.all(x >= env.goal_min) and np.all(x <= env.goal_max))
