"""Repeated seeded trials, summary statistics and convergence curves.

Trial ``i`` of every planner uses seed ``base_seed + i``, so planners are
compared on the same seed set.  Results are always ordered by planner and
trial index, whatever order worker processes finish in.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path as FsPath

import numpy as np

from .collision import Environment, load_environment
from .errors import ConfigurationError, ContractError
from .planner import PlannerParams, plan
from .sampling import SamplerKind

__all__ = [
    "Scenario",
    "TrialRecord",
    "SummaryRow",
    "load_scenario",
    "run_trial",
    "run_scenario",
    "summarize",
    "summary_stats",
    "cost_at",
    "convergence_curve",
    "write_convergence_csv",
    "write_summary_csv",
    "CONVERGENCE_COLUMNS",
    "SUMMARY_COLUMNS",
]

CONVERGENCE_COLUMNS = ("trial_id", "planner", "iteration", "elapsed_ms", "best_cost")
SUMMARY_COLUMNS = ("planner", "env", "trials", "success_rate", "avg", "std", "mad")


@dataclass
class Scenario:
    """One benchmark: an environment, the planners to compare and the budgets.

    ``env`` is a JSON file path or the name of a bundled environment.
    ``time_budget`` (seconds) is optional; without it runs are bounded by
    ``iterations`` alone and are reproducible.  ``params`` overrides fields
    of :class:`PlannerParams` for every trial.
    """

    env: str
    kinds: list = field(default_factory=lambda: ["informed", "c"])
    trials: int = 10
    iterations: int = 10_000
    time_budget: float | None = None
    base_seed: int = 0
    params: dict = field(default_factory=dict)
    record_time: bool = False
    name: str = ""

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigurationError("a scenario needs at least one trial")
        if not self.kinds:
            raise ConfigurationError("a scenario needs at least one sampler kind")
        if self.iterations < 1:
            raise ConfigurationError("iteration budget must be positive")
        if self.time_budget is not None and not self.time_budget > 0:
            raise ConfigurationError("time budget must be positive")
        self.kinds = [SamplerKind.parse(k).value for k in self.kinds]
        bad = {"max_iterations", "seed", "time_limit"} & set(self.params)
        if bad:
            raise ConfigurationError(
                f"params may not override {sorted(bad)}; use the scenario fields")
        # fail early on unknown or invalid overrides
        try:
            PlannerParams.from_dict(dict(self.params))
        except (ContractError, TypeError) as exc:
            raise ConfigurationError(f"bad planner params: {exc}") from exc

    def planner_params(self, trial: int) -> PlannerParams:
        return PlannerParams.from_dict({
            **self.params,
            "max_iterations": self.iterations,
            "seed": self.base_seed + trial,
            "time_limit": self.time_budget,
        })


@dataclass
class TrialRecord:
    trial_id: int
    planner: str
    seed: int
    history: list  # (iteration, elapsed_s, best_cost)
    final_cost: float
    first_solution_iteration: int | None
    iterations: int
    elapsed: float
    fallbacks: int = 0
    audits: int = 0
    audit_max_error: float = 0.0

    @property
    def solved(self) -> bool:
        return math.isfinite(self.final_cost)


@dataclass
class SummaryRow:
    planner: str
    env: str
    trials: int
    success_rate: float
    avg: float
    std: float
    mad: float


def load_scenario(path) -> Scenario:
    """Read a scenario JSON file; relative environment paths resolve against it."""
    path = FsPath(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read scenario {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigurationError(f"{path}: scenario must be a JSON object")
    known = set(Scenario.__dataclass_fields__)
    unknown = set(doc) - known
    if unknown:
        raise ConfigurationError(f"{path}: unknown scenario fields {sorted(unknown)}")
    if "env" not in doc:
        raise ConfigurationError(f"{path}: scenario needs an 'env' field")
    env = FsPath(doc["env"])
    if not env.is_absolute() and (path.parent / env).is_file():
        doc["env"] = str(path.parent / env)
    doc.setdefault("name", path.stem)
    try:
        return Scenario(**doc)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc


def run_trial(env: Environment, kind: str, params: PlannerParams, trial_id: int) -> TrialRecord:
    params.keep_tree = False
    res = plan(env, kind=kind, params=params)
    return TrialRecord(
        trial_id=trial_id,
        planner=SamplerKind.parse(kind).value,
        seed=params.seed,
        history=[tuple(h) for h in res.history],
        final_cost=res.best_cost,
        first_solution_iteration=res.first_solution_iteration,
        iterations=res.iterations,
        elapsed=res.elapsed,
        fallbacks=res.fallbacks,
        audits=res.audits,
        audit_max_error=res.audit_max_error,
    )


def _run_task(task):
    env_doc, kind, params, trial_id = task
    return run_trial(Environment.from_dict(env_doc), kind, params, trial_id)


def run_scenario(s: Scenario, workers: int = 1, env: Environment | None = None):
    """Run every (planner, trial) pair; return ``(records, summary_rows)``."""
    env = env if env is not None else load_environment(s.env)
    tasks = [(kind, s.planner_params(i), i) for kind in s.kinds for i in range(s.trials)]
    if workers <= 1:
        records = [run_trial(env, kind, p, i) for kind, p, i in tasks]
    else:
        doc = env.to_dict()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            # map preserves submission order
            records = list(pool.map(_run_task, [(doc, k, p, i) for k, p, i in tasks]))
    env_name = env.name or FsPath(s.env).stem
    return records, summarize(records, env_name, s.kinds)


def summary_stats(costs) -> tuple[float, float, float]:
    """Mean, sample standard deviation and median absolute deviation."""
    x = np.asarray(costs, dtype=float)
    if x.size == 0:
        return math.nan, math.nan, math.nan
    std = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    med = np.median(x)
    return float(np.mean(x)), std, float(np.median(np.abs(x - med)))


def cost_at(record: TrialRecord, budget: float | None = None, by: str = "time") -> float:
    """Best cost at the last history entry within ``budget`` (inf if none)."""
    if budget is None:
        return record.final_cost
    col = 1 if by == "time" else 0
    best = math.inf
    for entry in record.history:
        if entry[col] <= budget:
            best = entry[2]
    return best


def summarize(records, env_name: str = "", kinds=None, budget: float | None = None,
              by: str = "time") -> list[SummaryRow]:
    """One row per planner; unsolved trials only count against the success rate."""
    kinds = kinds or list(dict.fromkeys(r.planner for r in records))
    rows = []
    for kind in kinds:
        name = SamplerKind.parse(kind).value
        mine = [r for r in records if r.planner == name]
        costs = [cost_at(r, budget, by) for r in mine]
        solved = [c for c in costs if math.isfinite(c)]
        avg, std, mad = summary_stats(solved)
        rate = len(solved) / len(mine) if mine else 0.0
        rows.append(SummaryRow(SamplerKind.parse(kind).label, env_name, len(mine),
                               rate, avg, std, mad))
    return rows


def convergence_curve(records, grid, by: str = "time") -> dict:
    """Median and quartiles of the best cost across trials at each grid point.

    ``by="time"`` reads the grid in seconds, ``by="iteration"`` in
    iterations.  Trials without a solution yet count as infinite cost; a
    statistic that is infinite is reported as NaN (missing).
    Returns ``{planner: array of shape (len(grid), 3)}`` with columns
    ``q25, median, q75``.
    """
    if not records:
        raise ValueError("convergence_curve needs at least one record")
    grid = np.asarray(grid, dtype=float)
    col = 1 if by == "time" else 0
    out = {}
    for name in dict.fromkeys(r.planner for r in records):
        steps = []
        for r in (r for r in records if r.planner == name):
            h = np.asarray(r.history, dtype=float).reshape(-1, 3)
            # index of the last entry at or before each grid point
            idx = np.searchsorted(h[:, col], grid, side="right") - 1
            vals = np.where(idx >= 0, h[np.maximum(idx, 0), 2], np.inf)
            steps.append(vals)
        q = _quantiles(np.vstack(steps), (0.25, 0.5, 0.75))
        out[name] = np.where(np.isfinite(q), q, np.nan)
    return out


def _quantiles(V, qs) -> np.ndarray:
    # linear-interpolated quantiles down the columns of V; inf propagates
    V = np.sort(V, axis=0)
    n = V.shape[0]
    out = np.empty((V.shape[1], len(qs)))
    for j, q in enumerate(qs):
        pos = q * (n - 1)
        lo, g = int(math.floor(pos)), pos - math.floor(pos)
        a = V[lo]
        if g == 0:
            out[:, j] = a
            continue
        b = V[lo + 1]
        with np.errstate(invalid="ignore"):
            out[:, j] = np.where(np.isinf(b), np.inf, a + g * (b - a))
    return out


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x) if math.isfinite(x) else ("" if math.isnan(x) else str(x))
    return str(x)


def write_convergence_csv(records, path, record_time: bool = False):
    """One row per best-cost improvement; elapsed_ms left blank unless ``record_time``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CONVERGENCE_COLUMNS)
        for r in records:
            label = SamplerKind.parse(r.planner).label
            for it, elapsed, cost in r.history:
                ms = _fmt(round(elapsed * 1e3, 3)) if record_time else ""
                w.writerow((r.trial_id, label, it, ms, _fmt(float(cost))))


def write_summary_csv(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for row in rows:
            d = asdict(row)
            w.writerow(tuple(_fmt(d[c]) for c in SUMMARY_COLUMNS))
