"""Sampling spaces: uniform, informed, locally informed, convex and their intersection."""
from .combined import mix_with_informed, sample_combined, sample_informed
from .convex import (RejectionStats, Slice, build_slice, f_max_at, inside_hull,
                     random_perpendicular, sample_axial, sample_convex_direct,
                     sample_convex_rejection, slice_contains, slice_contains_many,
                     slice_points)
from .kinds import PathSampler, SamplerKind
from .local import LocalInformedSampler, draw_subpath, local_contains, sample_local
from .spheroid import (ProlateSpheroid, make_rng, sample_in_bounds, sample_spheroid,
                       sample_unit_ball, spheroid_contains)
from .uniform import sample_uniform
