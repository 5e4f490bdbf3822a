"""RRT* with pluggable post-solution sampling spaces.

The tree lives in metric coordinates (angular coordinates multiplied by the
rotation weight) so that nearest-neighbour queries, steering and all
sampling spaces use the plain Euclidean norm.  Collision checks map back to
configuration coordinates.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import gamma as gamma_fn

from .collision import Environment, edge_steps, in_goal, is_free_many
from .cspace import ConfigSpace, Path
from .errors import ContractError
from .sampling import PathSampler, SamplerKind, make_rng

__all__ = [
    "Tree",
    "PlannerParams",
    "PlanResult",
    "Planner",
    "plan",
    "extend",
    "rewire",
    "track_best",
]

log = logging.getLogger(__name__)


class Tree:
    """Append-only RRT* tree with cost-to-come and a kd-tree neighbour index.

    The kd-tree covers a prefix of the nodes and is rebuilt once the
    unindexed tail grows past ``rebuild_every``; the tail is scanned by brute
    force.
    """

    def __init__(self, root, space: ConfigSpace | None = None, capacity: int = 1024,
                 rebuild_every: int = 256):
        root = np.asarray(root, dtype=float)
        self.dim = root.size
        self.space = space
        self.X = np.empty((capacity, self.dim))
        self.parent = np.full(capacity, -1, dtype=np.int64)
        self.cost = np.zeros(capacity)
        self.edge = np.zeros(capacity)
        self.children: list[list[int]] = []
        self.n = 0
        self.rebuild_every = rebuild_every
        self._kd = None
        self._kd_n = 0
        self.add(root, -1, 0.0)

    def __len__(self):
        return self.n

    def _grow(self):
        cap = 2 * self.X.shape[0]
        self.X = np.resize(self.X, (cap, self.dim))
        self.parent = np.resize(self.parent, cap)
        self.cost = np.resize(self.cost, cap)
        self.edge = np.resize(self.edge, cap)

    def add(self, x, parent: int, edge_len: float) -> int:
        i = self.n
        if i == self.X.shape[0]:
            self._grow()
        self.X[i] = x
        self.parent[i] = parent
        self.edge[i] = edge_len
        self.cost[i] = 0.0 if parent < 0 else self.cost[parent] + edge_len
        self.children.append([])
        if parent >= 0:
            self.children[parent].append(i)
        self.n = i + 1
        if self.n - self._kd_n > self.rebuild_every:
            self._kd = cKDTree(self.X[: self.n])
            self._kd_n = self.n
        return i

    def reparent(self, i: int, p: int, edge_len: float):
        """Attach node ``i`` to ``p`` and refresh the costs of its subtree."""
        old = self.parent[i]
        if old >= 0:
            self.children[old].remove(i)
        self.parent[i] = p
        self.edge[i] = edge_len
        self.children[p].append(i)
        cost, edge, children = self.cost, self.edge, self.children
        cost[i] = cost[p] + edge_len
        stack = [i]
        while stack:
            u = stack.pop()
            cu = cost[u]
            for v in children[u]:
                cost[v] = cu + edge[v]
                stack.append(v)

    def nearest(self, x) -> tuple[int, float]:
        best_i, best_d = -1, math.inf
        if self._kd is not None:
            d, i = self._kd.query(x)
            best_i, best_d = int(i), float(d)
        if self.n > self._kd_n:
            tail = self.X[self._kd_n: self.n] - x
            d2 = np.einsum("ij,ij->i", tail, tail)
            j = int(np.argmin(d2))
            dj = math.sqrt(d2[j])
            if dj < best_d:
                best_i, best_d = self._kd_n + j, dj
        return best_i, best_d

    def near(self, x, radius: float) -> np.ndarray:
        parts = []
        if self._kd is not None:
            parts.append(np.asarray(self._kd.query_ball_point(x, radius), dtype=np.int64))
        if self.n > self._kd_n:
            tail = self.X[self._kd_n: self.n] - x
            d2 = np.einsum("ij,ij->i", tail, tail)
            parts.append(np.nonzero(d2 <= radius * radius)[0] + self._kd_n)
        if not parts:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate(parts) if len(parts) > 1 else parts[0]

    def knn(self, x, k: int) -> np.ndarray:
        k = min(k, self.n)
        d = np.linalg.norm(self.X[: self.n] - x, axis=1)
        return np.sort(np.argpartition(d, k - 1)[:k])

    def path_to(self, i: int) -> np.ndarray:
        idx = []
        while i >= 0:
            idx.append(i)
            i = int(self.parent[i])
        return self.X[idx[::-1]].copy()

    def recompute_costs(self) -> np.ndarray:
        """Costs rebuilt from edge geometry by walking parent chains."""
        out = np.full(self.n, np.nan)
        out[0] = 0.0
        order = [0]
        while order:
            u = order.pop()
            for v in self.children[u]:
                diff = self.X[v] - self.X[u]
                out[v] = out[u] + math.sqrt(diff @ diff)
                order.append(v)
        return out

    def cost_error(self) -> float:
        return float(np.max(np.abs(self.recompute_costs() - self.cost[: self.n])))

    def is_acyclic(self) -> bool:
        return not np.isnan(self.recompute_costs()).any()

    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Parent coordinates, child coordinates and child cost of every edge."""
        idx = np.arange(1, self.n)
        return self.X[self.parent[idx]], self.X[idx], self.cost[idx]


@dataclass
class PlannerParams:
    """RRT* settings.

    ``eta=None`` uses 5% of the metric diagonal of the space, ``gamma=None``
    the shrinking-ball constant computed from the space volume, and
    ``resolution=None`` a quarter of the smallest robot half extent.
    """

    max_iterations: int = 10_000
    eta: float | None = None
    gamma: float | None = None
    use_knn: bool = False
    goal_bias: float = 0.05
    c: int = 5
    m: int = 1000
    eps: float = 1e-5
    resolution: float | None = None
    seed: int = 0
    time_limit: float | None = None
    cost_threshold: float | None = None
    convex_mode: str = "direct"
    density: str = "profile"
    audit_every: int = 0
    keep_tree: bool = True

    def __post_init__(self):
        if self.max_iterations < 0:
            raise ContractError("max_iterations must be non-negative")
        if self.eta is not None and not self.eta > 0:
            raise ContractError("eta must be positive")
        if self.m < 1:
            raise ContractError("hull rebuild period m must be >= 1")
        if self.c < 2:
            raise ContractError("c must be >= 2")
        if not 0.0 <= self.eps <= 1.0:
            raise ContractError("eps must be within [0, 1]")
        if not 0.0 <= self.goal_bias <= 1.0:
            raise ContractError("goal_bias must be within [0, 1]")
        if self.resolution is not None and not self.resolution > 0:
            raise ContractError("resolution must be positive")
        if self.convex_mode not in ("direct", "rejection"):
            raise ContractError(f"unknown convex_mode {self.convex_mode!r}")
        if self.density not in ("profile", "volume"):
            raise ContractError(f"unknown density {self.density!r}")

    @classmethod
    def from_dict(cls, doc: dict) -> "PlannerParams":
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ContractError(f"unknown planner parameters: {sorted(unknown)}")
        return cls(**doc)


@dataclass
class PlanResult:
    best_path: Path | None
    best_cost: float
    history: list = field(default_factory=list)  # (iteration, elapsed_s, best_cost)
    first_solution_iteration: int | None = None
    iterations: int = 0
    elapsed: float = 0.0
    n_nodes: int = 0
    fallbacks: int = 0
    audits: int = 0
    audit_max_error: float = 0.0
    tree: Tree | None = None
    slice: object = None

    @property
    def solved(self) -> bool:
        return self.best_path is not None


def _unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2) / gamma_fn(d / 2 + 1)


class Planner:
    """One RRT* run on an environment with a chosen sampling space."""

    def __init__(self, env: Environment, kind=SamplerKind.UNIFORM,
                 params: PlannerParams | None = None, space: ConfigSpace | None = None):
        self.env = env
        self.kind = SamplerKind.parse(kind)
        self.params = params or PlannerParams()
        self.space = space or env.config_space()
        if self.space.dim != env.config_dim:
            raise ContractError("space dimension does not match the environment")
        p = self.params
        self.w = self.space.weights
        self.lower = self.space.lower * self.w
        self.upper = self.space.upper * self.w
        self.d = self.space.dim
        diag = float(np.linalg.norm(self.upper - self.lower))
        self.eta = p.eta if p.eta is not None else 0.05 * diag
        if p.gamma is not None:
            self.gamma = p.gamma
        else:
            d = self.d
            mu = float(np.prod(self.upper - self.lower))
            self.gamma = 2.0 * (1 + 1 / d) ** (1 / d) * (mu / _unit_ball_volume(d)) ** (1 / d)
        self.k_rrt = math.e * (1 + 1 / self.d)
        self.resolution = p.resolution if p.resolution is not None else env.default_resolution()
        self.rng = make_rng(p.seed)
        self.tree = Tree(self.space.to_metric(env.start), self.space)
        self.sampler = PathSampler(self.kind, self.lower, self.upper, c=p.c, eps=p.eps,
                                   convex_mode=p.convex_mode, density=p.density)
        self.goal_ids: list[int] = []
        self.best_id = -1
        self.best_cost = math.inf
        self._last_near = np.zeros(0, dtype=np.int64)
        self._last_near_dist = np.zeros(0)
        wdim = env.workspace_dim
        self._goal_lo = np.concatenate((env.goal_min, self.space.lower[wdim:])) * self.w
        self._goal_hi = np.concatenate((env.goal_max, self.space.upper[wdim:])) * self.w

    # -- geometry -------------------------------------------------------
    def radius(self) -> float:
        n = self.tree.n
        if n < 2:
            return self.eta
        return min(self.eta, self.gamma * (math.log(n) / n) ** (1.0 / self.d))

    def steer(self, x_from, x_to):
        diff = x_to - x_from
        dist = math.sqrt(diff @ diff)
        if dist <= self.eta:
            return x_to.copy(), dist
        return x_from + diff * (self.eta / dist), self.eta

    def configs_free(self, X) -> np.ndarray:
        return is_free_many(self.env, X / self.w)

    def edge_free(self, start, end) -> bool:
        diff = end - start
        steps = int(edge_steps(math.sqrt(diff @ diff), self.resolution))
        # s runs over [0, 1): the end point is checked by the caller
        s = np.arange(steps) / steps
        return bool(self.configs_free(start + s[:, None] * diff).all())

    def edges_free(self, starts, end) -> np.ndarray:
        """Collision status of every straight edge ``starts[i] -> end``."""
        starts = np.atleast_2d(starts)
        if len(starts) == 1:
            return np.array([self.edge_free(starts[0], end)])
        diff = end - starts
        dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        steps = edge_steps(dist, self.resolution)
        offsets = np.concatenate(([0], np.cumsum(steps)))
        total = int(offsets[-1])
        edge_of = np.repeat(np.arange(len(starts)), steps)
        s = (np.arange(total) - offsets[edge_of]) / steps[edge_of]
        pts = starts[edge_of] + s[:, None] * diff[edge_of]
        ok = self.configs_free(pts)
        return np.logical_and.reduceat(ok, offsets[:-1])

    def in_goal_metric(self, x) -> bool:
        return bool((x >= self._goal_lo).all() and (x <= self._goal_hi).all())

    # -- sampling --------------------------------------------------------
    def sample_pre_solution(self):
        rng = self.rng
        if rng.random() < self.params.goal_bias:
            return self._goal_lo + rng.random(self.d) * (self._goal_hi - self._goal_lo)
        return self.lower + rng.random(self.d) * (self.upper - self.lower)

    def sample(self):
        if self.best_id < 0:
            self.last_source = "uniform"
            return self.sample_pre_solution()
        q = self.sampler.sample(self.rng)
        self.last_source = self.sampler.last_source
        return q

    # -- RRT* primitives ---------------------------------------------------
    def extend(self, x_rand) -> int | None:
        tree = self.tree
        i_near, _ = tree.nearest(x_rand)
        x_new, step = self.steer(tree.X[i_near], x_rand)
        if step <= 0:
            return None
        if not self.configs_free(x_new[None, :])[0]:
            return None
        if self.params.use_knn:
            k = int(math.ceil(self.k_rrt * math.log(max(tree.n, 2))))
            near = tree.knn(x_new, k)
        else:
            near = tree.near(x_new, self.radius())
        if i_near not in near:
            near = np.append(near, i_near)
        diff = tree.X[near] - x_new
        dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        through = tree.cost[near] + dist
        order = np.argsort(through, kind="stable")
        parent = -1
        first = order[0]
        if self.edge_free(tree.X[near[first]], x_new):
            parent = first
        elif len(order) > 1:
            rest = order[1:]
            ok = self.edges_free(tree.X[near[rest]], x_new)
            if ok.any():
                parent = rest[int(np.argmax(ok))]
        if parent < 0:
            return None
        new = tree.add(x_new, int(near[parent]), float(dist[parent]))
        keep = np.arange(len(near)) != parent
        self._last_near = near[keep]
        self._last_near_dist = dist[keep]
        return new

    def rewire(self, new_id: int) -> int:
        tree = self.tree
        near, dist = self._last_near, self._last_near_dist
        if near.size == 0:
            return 0
        c_new = tree.cost[new_id]
        better = c_new + dist < tree.cost[near] - 1e-12
        if not better.any():
            return 0
        cand = near[better]
        cand_d = dist[better]
        ok = self.edges_free(tree.X[cand], tree.X[new_id])
        count = 0
        for j, dj, free in zip(cand, cand_d, ok):
            # an earlier rewire in this batch may already have lowered cost[j]
            if free and c_new + dj < tree.cost[j] - 1e-12:
                tree.reparent(int(j), new_id, float(dj))
                count += 1
        return count

    def track_best(self) -> bool:
        """Refresh the cheapest goal node; True when the best cost dropped."""
        if not self.goal_ids:
            return False
        ids = np.asarray(self.goal_ids)
        costs = self.tree.cost[ids]
        k = int(np.argmin(costs))
        if costs[k] < self.best_cost:
            self.best_id = int(ids[k])
            self.best_cost = float(costs[k])
            return True
        return False

    def best_path_metric(self) -> np.ndarray | None:
        if self.best_id < 0:
            return None
        return self.tree.path_to(self.best_id)

    # -- main loop --------------------------------------------------------
    def run(self, sample_callback=None) -> PlanResult:
        p = self.params
        history = []
        first_it = None
        fallbacks_before = self.sampler.fallbacks
        audits, audit_err = 0, 0.0
        t0 = time.perf_counter()
        it = 0
        for it in range(1, p.max_iterations + 1):
            if p.time_limit is not None and time.perf_counter() - t0 > p.time_limit:
                it -= 1
                break
            if first_it is not None and (it - first_it) % p.m == 0:
                self.sampler.rebuild_slice()
            x = self.sample()
            if sample_callback is not None:
                sample_callback(it, x, self.last_source)
            new = self.extend(x)
            if new is not None:
                self.rewire(new)
                if self.in_goal_metric(self.tree.X[new]):
                    self.goal_ids.append(new)
            if self.track_best():
                path = Path(self.best_path_metric())
                self.sampler.set_path(path, self.best_cost)
                if first_it is None:
                    first_it = it
                    self.sampler.rebuild_slice()
                history.append((it, time.perf_counter() - t0, self.best_cost))
            if p.audit_every and it % p.audit_every == 0:
                audits += 1
                audit_err = max(audit_err, self.tree.cost_error())
            if (p.cost_threshold is not None and self.best_id >= 0
                    and self.best_cost <= p.cost_threshold):
                break
        elapsed = time.perf_counter() - t0
        best_path = None
        if self.best_id >= 0:
            best_path = Path(self.space.from_metric(self.best_path_metric()))
        return PlanResult(
            best_path=best_path,
            best_cost=self.best_cost,
            history=history,
            first_solution_iteration=first_it,
            iterations=it,
            elapsed=elapsed,
            n_nodes=self.tree.n,
            fallbacks=self.sampler.fallbacks - fallbacks_before,
            audits=audits,
            audit_max_error=audit_err,
            tree=self.tree if p.keep_tree else None,
            slice=self.sampler.slice,
        )


def plan(env: Environment, space: ConfigSpace | None = None, kind=SamplerKind.UNIFORM,
         params: PlannerParams | None = None, sample_callback=None) -> PlanResult:
    """Run RRT* on ``env`` and return the best path found.

    Before the first solution samples are uniform with goal bias; afterwards
    they come from the sampling space selected by ``kind``.
    """
    return Planner(env, kind, params, space).run(sample_callback)


def extend(planner: Planner, q_rand) -> int | None:
    """Nearest, steer, choose-parent and insert for a metric-coordinate sample."""
    return planner.extend(np.asarray(q_rand, dtype=float))


def rewire(planner: Planner, new_id: int) -> int:
    return planner.rewire(new_id)


def track_best(tree: Tree, env: Environment) -> Path | None:
    """Cheapest root-to-goal path in ``tree`` (metric coordinates), if any."""
    space = tree.space if tree.space is not None else env.config_space()
    w = space.weights
    best, best_cost = -1, math.inf
    for i in range(tree.n):
        if in_goal(env, tree.X[i] / w) and tree.cost[i] < best_cost:
            best, best_cost = i, tree.cost[i]
    if best < 0:
        return None
    return Path(tree.path_to(best))
