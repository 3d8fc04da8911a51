"""Four synchronous robots that each see only two of the other three.

Run with ``python demos/fsync42_rounds.py``.
"""

import numpy as np

from dgather import SimParams, run_simulation
from dgather.scenarios import centroid_triangle, centroid_triangle_script

# A random start in the 10 x 10 box. Every robot is active each round,
# the adversary hides one of the three other robots at random, and
# robots are stopped after just delta = 0.1 whenever the target is farther.
params = SimParams(n=4, algorithm="fsync42", seed=13, visibility="random", motion="min-delta")
out, trace = run_simulation(params)

spans = np.array([r.metrics.span for r in trace.records])
areas = np.array([r.metrics.area for r in trace.records])
print(out.status, "after", out.final_step, "rounds")
print("span every 8 rounds:", np.round(spans[::8], 3))
print("area every 8 rounds:", np.round(areas[::8], 3))

# The diameter never grows, whichever robot the adversary hides.
assert np.all(np.diff(spans) <= 1e-9)

# Same start, other adversaries
for vis in ("hide-nearest", "hide-farthest"):
    other = SimParams(n=4, algorithm="fsync42", seed=13, visibility=vis, motion="min-delta")
    print(f"{vis:14s}:", run_simulation(other)[0].final_step, "rounds")

# A hand-written view script: an equilateral triangle with a fourth
# robot at its centre. Printing the decision rule each robot applied
# shows how the multiplicity forms and then collapses.
scripted = SimParams(n=4, algorithm="fsync42", initial=centroid_triangle(), motion="full",
                     visibility="scripted", script=centroid_triangle_script())
out, trace = run_simulation(scripted)
for rec in trace.records[1:]:
    print(f"round {rec.step}:", [m.case for m in rec.moves])
print("gathered at", tuple(out.final_positions[0]), "in", out.final_step, "rounds")
