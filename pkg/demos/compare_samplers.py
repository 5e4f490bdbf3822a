"""Compare the post-solution sampling spaces on one environment.

Each sampler runs the same seeds with the same iteration budget; the
script prints the median final cost per sampler and, for 2D maps, draws
the search tree, path and hull of the last convex run to an SVG file.

Run with ``python demos/compare_samplers.py [env] [trials] [iterations]``,
for example ``python demos/compare_samplers.py wall 5 20000``.
"""
import sys

import numpy as np

from omnirrt import PlannerParams, SamplerKind, load_environment, plan
from omnirrt.svg import environment_svg, hull_outline, write_svg


def main(env_name="wall", trials=3, iterations=10_000):
    env = load_environment(env_name)
    last = None
    for kind in SamplerKind:
        costs = []
        for seed in range(trials):
            r = plan(env, kind=kind, params=PlannerParams(max_iterations=iterations, seed=seed))
            costs.append(r.best_cost)
            if kind is SamplerKind.CONVEX:
                last = r
        print(f"{kind.label:<15} median {np.median(costs):8.2f}   "
              f"runs {' '.join(f'{c:.1f}' for c in costs)}")

    if env.workspace_dim == 2 and last is not None and last.solved:
        parents, children, _ = last.tree.edges()
        svg = environment_svg(env, path=last.best_path.points, tree_edges=(parents, children),
                              hull=hull_outline(last.slice))
        out = f"{env_name}_c_rrt.svg"
        write_svg(svg, out)
        print(f"wrote {out}")


if __name__ == "__main__":
    args = sys.argv[1:]
    main(args[0] if args else "wall",
         int(args[1]) if len(args) > 1 else 3,
         int(args[2]) if len(args) > 2 else 10_000)
