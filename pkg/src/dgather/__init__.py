"""Simulation laboratory for gathering oblivious robots under defected views."""

from .checker import (
    Report,
    adversary_search_42,
    check_collinear_midpoint_lemma,
    check_longest_line_bound,
    check_trace_invariants,
    enumerate_view_assignments_42,
    predict_gathering_point,
)
from .engine import Outcome, SimParams, Simulation, StepRecord, Trace, run_simulation
from .errors import (
    DGatherError,
    InvalidGeometry,
    InvalidInput,
    ResourceLimit,
    ScriptError,
    TraceFormatError,
)
from .geometry import DEFAULT_TOL, Point, Tolerances, extremal_frame, hull_metrics
from .model import Configuration, Observation
from .async_nk import compute_destination_nk
from .fsync42 import compute_destination_42

__version__ = "0.1.0"
