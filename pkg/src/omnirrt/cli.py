"""Command-line front end: ``plan``, ``bench`` and ``slice`` subcommands."""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path as FsPath

import numpy as np

from .bench import load_scenario, run_scenario, write_convergence_csv, write_summary_csv
from .collision import load_environment
from .cspace import Path, transf_many
from .errors import ConfigurationError, ContractError
from .planner import PlannerParams, plan
from .sampling import build_slice
from .svg import environment_svg, hull_outline, slice_svg, write_svg

log = logging.getLogger("omnirrt")

SAMPLERS = ("uniform", "informed", "pi", "c", "pic")


class _Parser(argparse.ArgumentParser):
    # usage errors exit with 1; 2 is reserved for "no solution"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return repr(float(x))


def write_path_csv(P, path):
    """One waypoint per row, one column per coordinate, no header."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in np.asarray(P, dtype=float):
            w.writerow([_fmt(x) for x in row])


def read_path_csv(path) -> np.ndarray:
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                rows.append([float(x) for x in row])
            except ValueError as exc:
                raise ConfigurationError(f"{path}: line {lineno}: {exc}") from exc
    if rows and len({len(r) for r in rows}) != 1:
        raise ConfigurationError(f"{path}: rows have differing numbers of columns")
    return np.array(rows, dtype=float)


def write_tree_csv(tree, space, path):
    """Edge list in configuration coordinates: parent coords, child coords, child cost."""
    parents, children, costs = tree.edges()
    parents, children = space.from_metric(parents), space.from_metric(children)
    d = tree.dim
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"parent_q{i}" for i in range(d)] + [f"child_q{i}" for i in range(d)]
                   + ["cost"])
        for p, c, cost in zip(parents, children, costs):
            w.writerow([_fmt(x) for x in p] + [_fmt(x) for x in c] + [_fmt(cost)])


def cmd_plan(args) -> int:
    env = load_environment(args.env)
    params = PlannerParams(max_iterations=args.iters, seed=args.seed, c=args.c, m=args.m,
                           eps=args.eps)
    res = plan(env, kind=args.sampler, params=params)
    space = env.config_space()
    if res.solved:
        print(f"best_cost {res.best_cost:.6f}")
        print(f"first_solution_iteration {res.first_solution_iteration}")
    else:
        print("best_cost inf")
        print("first_solution_iteration none")
    if args.out and res.solved:
        write_path_csv(res.best_path.points, args.out)
    if args.tree:
        write_tree_csv(res.tree, space, args.tree)
    if args.svg:
        if env.workspace_dim != 2:
            print("note: SVG export skipped for a 3D workspace", file=sys.stderr)
        else:
            parents, children, _ = res.tree.edges()
            hull = None
            if res.slice is not None:
                try:
                    hull = hull_outline(res.slice)
                except ContractError:
                    hull = None
            root = environment_svg(
                env,
                path=res.best_path.points if res.solved else None,
                tree_edges=(parents, children),
                hull=hull,
            )
            write_svg(root, args.svg)
    return 0 if res.solved else 2


def cmd_bench(args) -> int:
    scenario = load_scenario(args.scenario)
    out = FsPath(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records, rows = run_scenario(scenario, workers=args.workers)
    write_convergence_csv(records, out / "convergence.csv", record_time=scenario.record_time)
    write_summary_csv(rows, out / "summary.csv")
    print(f"{'planner':<16}{'env':<12}{'trials':>7}{'success':>9}{'avg':>11}{'std':>10}"
          f"{'mad':>10}")
    for r in rows:
        print(f"{r.planner:<16}{r.env:<12}{r.trials:>7}{r.success_rate:>9.2f}"
              f"{r.avg:>11.2f}{r.std:>10.2f}{r.mad:>10.2f}")
    return 0


def cmd_slice(args) -> int:
    pts = read_path_csv(args.path)
    if len(pts) < 2:
        raise ConfigurationError("a path needs at least two waypoints")
    P = Path(pts)
    s = build_slice(P)
    frame = s.frame
    np.set_printoptions(precision=6, suppress=True)
    print(f"origin {frame.origin}")
    print(f"direction {frame.direction}")
    print(f"extent {frame.extent:.6f}")
    a, f = transf_many(frame, P.points)
    print("transformed points (a, f):")
    for ai, fi in zip(a, f):
        print(f"  {ai:.6f} {fi:.6f}")
    print(f"extremal vertices ({len(s.vertices)}):")
    for va, vf in s.vertices:
        print(f"  {va:.4f} {vf:.4f}")
    if args.svg:
        write_svg(slice_svg(s, np.column_stack((a, f))), args.svg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="omnirrt", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("plan", help="run one planner")
    p.add_argument("--env", required=True, help="environment JSON file or bundled name")
    p.add_argument("--sampler", choices=SAMPLERS, default="c")
    p.add_argument("--iters", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--c", type=int, default=5, help="subpath cardinality parameter")
    p.add_argument("--m", type=int, default=1000, help="hull rebuild period")
    p.add_argument("--eps", type=float, default=1e-5, help="informed mixing probability")
    p.add_argument("--out", help="best path CSV")
    p.add_argument("--tree", help="tree edge list CSV")
    p.add_argument("--svg", help="SVG figure (2D workspaces)")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("bench", help="run a benchmark scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("slice", help="inspect the slice of a path's hull")
    p.add_argument("--path", required=True, help="CSV waypoints")
    p.add_argument("--svg", help="SVG of the slice polygon")
    p.set_defaults(func=cmd_slice)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help and usage errors; hand the code back to in-process callers
        return exc.code if isinstance(exc.code, int) else 1
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (ConfigurationError, ContractError, OSError) as exc:
        print(f"omnirrt {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
