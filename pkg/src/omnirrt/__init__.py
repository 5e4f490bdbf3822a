"""RRT* with locally informed, convex hull-of-revolution and combined sampling spaces."""
from .bench import Scenario, SummaryRow, TrialRecord, convergence_curve, run_scenario, summarize
from .collision import (Environment, in_goal, is_free, is_free_many, load_environment,
                        segment_free)
from .cspace import (AxisFrame, ConfigSpace, Path, build_axis_frame, metric_distance,
                     path_length, subpath, transf)
from .errors import (ConfigurationError, ContractError, DegenerateAxisError,
                     InfeasibleSpheroidError, SamplingExhaustedError,
                     UnsupportedDimensionError)
from .planner import PlannerParams, PlanResult, Planner, Tree, plan
from .sampling import SamplerKind, build_slice, make_rng

__version__ = "0.1.0"
