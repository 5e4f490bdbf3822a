"""Build the slice of a short 3D path and look at its hull of revolution.

The path runs from (-3, 0, 0) to (5, 0, 0).  Its waypoints are projected
onto (axial position, distance from the axis), the upper convex hull of
those points is the slice, and rotating the slice about the start-goal
axis gives the hull that the convex sampler draws from.

Run with ``python demos/worked_slice.py [out.svg]``.
"""
import sys

import numpy as np

from omnirrt.cspace import transf_many
from omnirrt.sampling import build_slice, make_rng, sample_convex_direct, slice_contains_many
from omnirrt.svg import slice_svg, write_svg

P = np.array([(-3, 0, 0), (0, -2, -2), (2, 2, 0), (3, 2, 2), (5, 0, 0)], dtype=float)


def main(out=None):
    s = build_slice(P)
    a, f = transf_many(s.frame, P)
    print("waypoints in slice coordinates (a, f):")
    for ai, fi in zip(a, f):
        print(f"  ({ai:.4f}, {fi:.4f})")
    print("slice vertices:")
    for va, vf in s.vertices:
        print(f"  ({va:.4f}, {vf:.4f})")
    # the third waypoint sits under the chord between its neighbours and drops out

    rng = make_rng(0)
    Q = sample_convex_direct(s, rng=rng, size=50_000)
    print(f"{len(Q)} direct samples, all inside the hull: {slice_contains_many(s, Q).all()}")
    qa, _ = transf_many(s.frame, Q)
    hist, edges = np.histogram(qa, bins=8, range=(0, s.extent))
    print("axial histogram (more mass where the slice is taller):")
    for lo, n in zip(edges[:-1], hist):
        print(f"  a >= {lo:4.1f}: {'#' * int(60 * n / hist.max())}")

    if out:
        write_svg(slice_svg(s, np.column_stack((a, f))), out)
        print(f"wrote {out}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)
