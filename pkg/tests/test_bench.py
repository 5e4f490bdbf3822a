import json
import math
import statistics

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omnirrt import ConfigurationError
from omnirrt.bench import (CONVERGENCE_COLUMNS, SUMMARY_COLUMNS, Scenario, TrialRecord,
                           convergence_curve, cost_at, load_scenario, run_scenario,
                           summarize, summary_stats, write_convergence_csv,
                           write_summary_csv)


def record(history, planner="c", trial=0):
    final = history[-1][2] if history else math.inf
    return TrialRecord(trial, planner, trial, list(history), final,
                       history[0][0] if history else None, 100, 1.0)


def welford(xs):
    n, mean, m2 = 0, 0.0, 0.0
    for x in xs:
        n += 1
        d = x - mean
        mean += d / n
        m2 += d * (x - mean)
    return mean, math.sqrt(m2 / (n - 1)) if n > 1 else 0.0


def test_summary_stats_hand_example():
    avg, std, mad = summary_stats([1, 2, 3, 4, 100])
    assert avg == 22.0
    # sqrt((21^2 + 20^2 + 19^2 + 18^2 + 78^2) / 4) = sqrt(1902.5)
    assert std == pytest.approx(math.sqrt(1902.5), abs=1e-12)
    assert std == pytest.approx(43.617656975128, abs=1e-9)
    assert mad == 1.0


def test_summary_stats_single_and_empty():
    assert summary_stats([7.5]) == (7.5, 0.0, 0.0)
    assert all(math.isnan(v) for v in summary_stats([]))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=2,
                max_size=60))
def test_summary_stats_match_streaming_pass(xs):
    avg, std, mad = summary_stats(xs)
    mean, sd = welford(xs)
    scale = max(1.0, max(abs(x) for x in xs))
    assert abs(avg - mean) <= 1e-12 * scale
    assert abs(std - sd) <= 1e-12 * scale * math.sqrt(len(xs))
    med = statistics.median(xs)
    assert mad == pytest.approx(statistics.median(abs(x - med) for x in xs), abs=1e-12 * scale)


def test_cost_at_cutoff():
    r = record([(5, 0.5, 10.0), (9, 1.5, 8.0), (20, 3.0, 7.0)])
    assert cost_at(r) == 7.0
    assert cost_at(r, 0.4) == math.inf
    assert cost_at(r, 1.5) == 8.0
    assert cost_at(r, 10, by="iteration") == 8.0


def test_summarize_excludes_unsolved():
    recs = [record([(1, 0.1, c)], trial=i) for i, c in enumerate([1, 2, 3, 4, 100])]
    recs.append(record([], trial=5))
    recs.append(record([(1, 0.1, 5.0)], planner="informed"))
    rows = summarize(recs, "toy", ["c", "informed", "pi"])
    c, inf, pi = rows
    assert (c.planner, c.env, c.trials, c.avg, c.mad) == ("C-RRT*", "toy", 6, 22.0, 1.0)
    assert c.success_rate == pytest.approx(5 / 6)
    assert (inf.avg, inf.std, inf.mad, inf.success_rate) == (5.0, 0.0, 0.0, 1.0)
    assert pi.trials == 0 and pi.success_rate == 0.0 and math.isnan(pi.avg)


def test_convergence_single_record_is_its_step_function():
    h = [(3, 0.2, 9.0), (7, 0.5, 6.0), (9, 0.9, 5.5)]
    grid = [0.1, 0.2, 0.3, 0.5, 0.8, 1.0]
    curve = convergence_curve([record(h)], grid)["c"]
    assert np.isnan(curve[0]).all()
    expected = [9.0, 9.0, 6.0, 6.0, 5.5]
    for col in range(3):
        assert curve[1:, col].tolist() == expected
    by_it = convergence_curve([record(h)], [2, 3, 8], by="iteration")["c"][:, 1]
    assert np.isnan(by_it[0]) and by_it[1:].tolist() == [9.0, 6.0]


def test_convergence_median_of_three_at_crossing():
    # a drops below b at t=2, c is flat
    a = record([(1, 1.0, 10.0), (2, 2.0, 4.0)], trial=0)
    b = record([(1, 1.0, 6.0), (3, 3.0, 5.0)], trial=1)
    c = record([(1, 1.0, 8.0)], trial=2)
    q = convergence_curve([a, b, c], [1.0, 2.0, 3.0])["c"]
    # t=1: {10, 6, 8}; t=2: {4, 6, 8}; t=3: {4, 5, 8}
    assert q[:, 1].tolist() == [8.0, 6.0, 5.0]
    assert q[:, 0].tolist() == [7.0, 5.0, 4.5]
    assert q[:, 2].tolist() == [9.0, 7.0, 6.5]


def test_convergence_missing_quantiles_and_planners():
    early = [record([(1, 1.0, 10.0)], trial=i) for i in range(2)]
    late = [record([(5, 5.0, 6.0)], trial=i) for i in range(2, 5)]
    c = record([(1, 1.0, 4.0)], planner="informed")
    out = convergence_curve(early + late + [c], [1.0, 5.0])
    assert set(out) == {"c", "informed"}
    # at t=1 three of five trials are unsolved: {10, 10, inf, inf, inf}
    assert out["c"][0, 0] == 10.0 and np.isnan(out["c"][0, 1:]).all()
    assert out["c"][1].tolist() == [6.0, 6.0, 10.0]
    # an interpolation that touches an unsolved trial is missing too
    two = convergence_curve(early[:1] + late[:1], [1.0])["c"]
    assert np.isnan(two).all()
    with pytest.raises(ValueError):
        convergence_curve([], [1.0])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.floats(min_value=1, max_value=100), min_size=1, max_size=8),
                min_size=1, max_size=6))
def test_convergence_curves_non_increasing(cost_lists):
    recs = []
    for i, cs in enumerate(cost_lists):
        cs = sorted(cs, reverse=True)
        recs.append(record([(j + 1, float(j + 1), c) for j, c in enumerate(cs)], trial=i))
    q = convergence_curve(recs, np.arange(0, 10, 0.5))["c"]
    for col in range(3):
        v = q[:, col]
        v = v[~np.isnan(v)]
        assert np.all(np.diff(v) <= 1e-12)


def test_scenario_validation():
    with pytest.raises(ConfigurationError):
        Scenario("empty", trials=0)
    with pytest.raises(ConfigurationError):
        Scenario("empty", kinds=[])
    with pytest.raises(ConfigurationError):
        Scenario("empty", time_budget=0)
    with pytest.raises(ConfigurationError):
        Scenario("empty", params={"seed": 3})
    with pytest.raises(ConfigurationError):
        Scenario("empty", params={"bogus": 3})
    with pytest.raises(ConfigurationError):
        Scenario("empty", params={"c": 1})
    s = Scenario("empty", kinds=["PIC", "Informed-RRT*"], base_seed=10, params={"c": 3})
    assert s.kinds == ["pic", "informed"]
    p = s.planner_params(4)
    assert (p.seed, p.c, p.max_iterations) == (14, 3, s.iterations)


def test_load_scenario_errors(tmp_path):
    with pytest.raises(ConfigurationError):
        load_scenario(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text('{"env": "empty",\n "trials": 3,,\n}')
    with pytest.raises(ConfigurationError, match="line 2 column"):
        load_scenario(bad)
    extra = tmp_path / "extra.json"
    extra.write_text(json.dumps({"env": "empty", "budget": 3}))
    with pytest.raises(ConfigurationError, match="unknown"):
        load_scenario(extra)
    noenv = tmp_path / "noenv.json"
    noenv.write_text(json.dumps({"trials": 3}))
    with pytest.raises(ConfigurationError):
        load_scenario(noenv)


def test_scenario_env_resolves_next_to_file(tmp_path):
    from omnirrt.collision import load_environment
    (tmp_path / "mine.json").write_text(json.dumps(load_environment("empty").to_dict()))
    f = tmp_path / "s.json"
    f.write_text(json.dumps({"env": "mine.json", "trials": 1}))
    s = load_scenario(f)
    assert s.env == str(tmp_path / "mine.json") and s.name == "s"


def test_unloadable_environment():
    with pytest.raises(ConfigurationError):
        run_scenario(Scenario("no_such_env", trials=1, iterations=10))


def test_run_scenario_deterministic_csv(tmp_path):
    s = Scenario("empty", kinds=["informed", "c"], trials=2, iterations=400, base_seed=5)
    outs = []
    for k in range(2):
        records, rows = run_scenario(s)
        d = tmp_path / str(k)
        d.mkdir()
        write_convergence_csv(records, d / "conv.csv")
        write_summary_csv(rows, d / "sum.csv")
        outs.append(((d / "conv.csv").read_bytes(), (d / "sum.csv").read_bytes()))
    assert outs[0] == outs[1]
    conv, summ = outs[0][0].decode().splitlines(), outs[0][1].decode().splitlines()
    assert conv[0] == ",".join(CONVERGENCE_COLUMNS)
    assert summ[0] == ",".join(SUMMARY_COLUMNS)
    assert [r.seed for r in records] == [5, 6, 5, 6]
    # elapsed_ms stays blank unless requested
    assert all(line.split(",")[3] == "" for line in conv[1:])
    write_convergence_csv(records, tmp_path / "t.csv", record_time=True)
    rows_t = (tmp_path / "t.csv").read_text().splitlines()[1:]
    assert all(float(line.split(",")[3]) >= 0 for line in rows_t)


def test_single_trial_summary_equals_final_cost():
    records, rows = run_scenario(Scenario("empty", kinds=["informed"], trials=1,
                                          iterations=500))
    r = records[0]
    assert r.solved
    assert rows[0].avg == r.final_cost and rows[0].std == 0.0 and rows[0].mad == 0.0
    assert rows[0].success_rate == 1.0


def test_parallel_matches_serial():
    s = Scenario("empty", kinds=["pi"], trials=3, iterations=300)
    a, _ = run_scenario(s)
    b, _ = run_scenario(s, workers=2)
    assert [(r.trial_id, r.history[-1][::2]) for r in a] == \
           [(r.trial_id, r.history[-1][::2]) for r in b]
