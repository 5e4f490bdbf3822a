import math

import numpy as np
import pytest

from omnirrt import ContractError, Environment, Path, PlannerParams, SamplerKind, plan
from omnirrt.collision import in_goal, is_free, load_environment, segment_free
from omnirrt.planner import Planner, Tree, extend, rewire, track_best
from omnirrt.sampling import local_contains, slice_contains, spheroid_contains


def point_env(obstacles=(), size=10.0, goal=((8, 8), (9, 9)), start=(2, 2)):
    """Tiny translation-only robot, so metric and configuration coordinates agree."""
    return Environment(
        workspace_dim=2, bounds_min=[0, 0], bounds_max=[size, size],
        obstacles_min=[o[0] for o in obstacles] or np.zeros((0, 2)),
        obstacles_max=[o[1] for o in obstacles] or np.zeros((0, 2)),
        half_extents=[0.05, 0.05], rotatable=False, start=start,
        goal_min=goal[0], goal_max=goal[1],
    )


def wide_planner(env, **kw):
    # neighbour radius equal to eta for the hand-built cases
    return Planner(env, params=PlannerParams(eta=kw.pop("eta", 5.0), gamma=1e6, **kw))


def test_extend_single_node_respects_eta():
    p = wide_planner(point_env(), eta=1.5)
    new = extend(p, np.array([9.0, 9.0]))
    assert new == 1
    d = np.linalg.norm(p.tree.X[1] - p.tree.X[0])
    assert d == pytest.approx(1.5)
    assert p.tree.cost[1] == pytest.approx(1.5)


def test_extend_picks_cheaper_parent():
    # eta 1.2 keeps the root out of the near set
    p = wide_planner(point_env(), eta=1.2)
    t = p.tree
    b = t.add(np.array([3.0, 2.0]), 0, 1.0)             # cost 1
    c = t.add(np.array([3.0, 3.0]), 0, math.sqrt(2))    # cost sqrt(2)
    # (4, 2.5): via b 1 + sqrt(1.25) = 2.118..., via c sqrt(2) + sqrt(1.25) = 2.532...
    new = extend(p, np.array([4.0, 2.5]))
    assert t.parent[new] == b
    assert t.cost[new] == pytest.approx(1 + math.sqrt(1.25))
    assert list(p._last_near) == [c]


def test_extend_blocked_edge_returns_none():
    env = point_env(obstacles=[((4, 0), (4.5, 10))], goal=((8, 8), (9, 9)))
    p = wide_planner(env, eta=20.0)
    assert extend(p, np.array([6.0, 2.0])) is None
    assert len(p.tree) == 1
    # a sample inside the obstacle is rejected as well
    assert extend(p, np.array([4.2, 2.0])) is None


def test_rewire_no_near_nodes():
    p = wide_planner(point_env())
    assert rewire(p, 0) == 0


def test_rewire_diamond_saves_two_minus_sqrt2():
    p = wide_planner(point_env(), eta=1.0)
    t = p.tree
    b = t.add(np.array([3.0, 2.0]), 0, 1.0)
    d = t.add(np.array([3.0, 3.0]), b, 1.0)             # cost 2 around the corner
    e = t.add(np.array([3.0, 4.0]), d, 1.0)             # descendant outside the radius
    before = t.cost[d]
    m = extend(p, np.array([2.5, 2.5]))
    assert t.parent[m] == 0
    assert rewire(p, m) == 1
    assert t.parent[d] == m
    assert before - t.cost[d] == pytest.approx(2 - math.sqrt(2), abs=1e-12)
    assert t.cost[e] == pytest.approx(1 + math.sqrt(2), abs=1e-12)
    assert t.parent[b] == 0
    assert t.cost_error() <= 1e-9 and t.is_acyclic()


def test_track_best_cases():
    env = point_env()
    w = env.config_space().weights
    t = Tree(env.start * w, env.config_space())
    assert track_best(t, env) is None
    a = t.add(np.array([5.0, 5.0]), 0, math.sqrt(18))
    g1 = t.add(np.array([8.5, 8.5]), a, math.sqrt(24.5))
    P = track_best(t, env)
    assert np.array_equal(P.points, t.X[[0, a, g1]])
    g2 = t.add(np.array([8.2, 8.2]), 0, math.sqrt(2 * 6.2 ** 2))
    P = track_best(t, env)
    assert np.array_equal(P.points, t.X[[0, g2]])
    assert t.cost[g2] < t.cost[g1]


def test_tree_grows_and_queries_match_brute_force(rng):
    t = Tree(np.zeros(3), capacity=4, rebuild_every=16)
    X = rng.uniform(-1, 1, (300, 3))
    for x in X:
        i, _ = t.nearest(x)
        t.add(x, i, float(np.linalg.norm(x - t.X[i])))
    all_x = t.X[: t.n]
    for q in rng.uniform(-1, 1, (50, 3)):
        d = np.linalg.norm(all_x - q, axis=1)
        i, di = t.nearest(q)
        assert di == pytest.approx(d.min())
        assert set(t.near(q, 0.4).tolist()) == set(np.nonzero(d <= 0.4)[0].tolist())
        assert set(t.knn(q, 7).tolist()) == set(np.argsort(d)[:7].tolist())
    assert t.cost_error() <= 1e-12


def test_radius_rule():
    p = Planner(point_env(), params=PlannerParams(eta=1.0, gamma=2.0))
    assert p.radius() == 1.0
    for _ in range(999):
        p.tree.add(np.array([2.0, 2.0]), 0, 0.0)
    assert p.radius() == pytest.approx(2.0 * (math.log(1000) / 1000) ** 0.5)


def test_default_eta_is_five_percent_of_diagonal():
    env = load_environment("empty")
    p = Planner(env)
    lo, hi = p.lower, p.upper
    assert p.eta == pytest.approx(0.05 * np.linalg.norm(hi - lo))


def test_params_contract():
    for bad in (dict(c=1), dict(eps=-0.1), dict(m=0), dict(eta=0.0), dict(goal_bias=2.0),
                dict(convex_mode="x"), dict(density="x"), dict(max_iterations=-1)):
        with pytest.raises(ContractError):
            PlannerParams(**bad)
    with pytest.raises(ContractError):
        PlannerParams.from_dict({"iters": 5})


@pytest.mark.parametrize("kind", list(SamplerKind))
def test_plan_on_small_map(kind):
    env = point_env(obstacles=[((4, 0), (5, 7))])
    r = plan(env, kind=kind, params=PlannerParams(max_iterations=1500, seed=3, audit_every=250))
    assert r.solved
    P = r.best_path.points
    assert np.array_equal(P[0], env.start)
    assert in_goal(env, P[-1])
    for a, b in zip(P[:-1], P[1:]):
        assert segment_free(env, a, b)
    costs = [h[2] for h in r.history]
    assert all(x >= y for x, y in zip(costs, costs[1:]))
    assert r.best_cost == pytest.approx(r.best_path.segment_lengths().sum())
    assert r.audits == 6 and r.audit_max_error <= 1e-9
    # the path has to go over the obstacle top
    assert r.best_cost >= math.dist((2, 2), (4, 7)) + math.dist((5, 7), (8, 8))


def test_determinism():
    env = load_environment("empty")
    prm = PlannerParams(max_iterations=600, seed=11)
    a = plan(env, kind="pic", params=prm)
    b = plan(env, kind="pic", params=prm)
    assert [h[::2] for h in a.history] == [h[::2] for h in b.history]
    assert np.array_equal(a.best_path.points, b.best_path.points)
    c = plan(env, kind="pic", params=PlannerParams(max_iterations=600, seed=12))
    assert not np.array_equal(a.best_path.points, c.best_path.points)


def test_cost_threshold_and_budget():
    env = load_environment("empty")
    r = plan(env, kind="informed", params=PlannerParams(max_iterations=5000, seed=0,
                                                        cost_threshold=math.inf))
    assert r.solved and r.iterations == r.first_solution_iteration
    r = plan(env, params=PlannerParams(max_iterations=0))
    assert not r.solved and r.iterations == 0 and r.best_path is None


def test_time_limit_stops_early():
    env = load_environment("empty")
    r = plan(env, params=PlannerParams(max_iterations=10 ** 7, time_limit=0.2))
    assert r.iterations < 10 ** 7 and r.elapsed < 5.0


def collect_post_solution(env, kind, iters=2500, seed=4, **kw):
    planner = Planner(env, kind, PlannerParams(max_iterations=iters, seed=seed, **kw))
    seen = []

    def record(it, x, source):
        s = planner.sampler
        seen.append((source, x.copy(), s.path, s.slice, s.informed))

    planner.run(record)
    return planner, seen


def test_local_informed_samples_pass_membership():
    env = point_env(obstacles=[((4, 0), (5, 7))])
    planner, seen = collect_post_solution(env, "pi")
    post = [(x, P) for src, x, P, _, _ in seen if src == "local"]
    assert len(post) > 500
    for x, P in post:
        assert local_contains(P, 5, x)[0]


@pytest.mark.parametrize("kind", ["c", "pic"])
def test_convex_samples_pass_slice_membership(kind):
    env = point_env(obstacles=[((4, 0), (5, 7))])
    planner, seen = collect_post_solution(env, kind, m=200)
    post = [(x, s) for src, x, _, s, _ in seen if src in ("convex", "combined")]
    assert len(post) > 500
    for x, s in post:
        assert slice_contains(s, x)


def test_slice_rebuilt_on_first_solution_then_every_m():
    env = point_env(obstacles=[((4, 0), (5, 7))])
    planner, seen = collect_post_solution(env, "c", m=300)
    first = next(i for i, (src, *_ ) in enumerate(seen) if src != "uniform")
    slices = [s for _, _, _, s, _ in seen[first:]]
    changes = [i for i in range(1, len(slices)) if slices[i] is not slices[i - 1]]
    # entry i belongs to iteration first_solution + 1 + i
    assert changes and all((c + 1) % 300 == 0 for c in changes)


def test_informed_samples_inside_spheroid():
    env = point_env(obstacles=[((4, 0), (5, 7))])
    planner, seen = collect_post_solution(env, "informed")
    post = [(x, e) for src, x, _, _, e in seen if src == "informed"]
    assert len(post) > 500
    for x, e in post:
        assert spheroid_contains(e, x)


def test_local_with_c_at_least_n_is_informed(rng):
    env = point_env()
    p = Planner(env, "pi", PlannerParams(c=50))
    P = Path([(2.0, 2.0), (5.0, 4.0), (8.5, 8.5)])
    p.sampler.set_path(P)
    for _ in range(500):
        assert spheroid_contains(p.sampler.informed, p.sampler.sample(rng))


def test_space_dimension_mismatch():
    from omnirrt import ConfigSpace
    with pytest.raises(ContractError):
        Planner(point_env(), space=ConfigSpace([0, 0, 0], [1, 1, 1]))


def test_start_is_free_and_first_node_is_root():
    env = load_environment("hard")
    p = Planner(env)
    assert is_free(env, env.start)
    assert np.allclose(p.tree.X[0] / p.w, env.start)
