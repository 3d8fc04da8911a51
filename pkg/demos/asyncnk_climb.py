"""Asynchronous robots drifting up the Go-Lines of the extremal frame.

Run with ``python demos/asyncnk_climb.py``. Takes a few seconds.
"""

import numpy as np

from dgather import SimParams, run_simulation
from dgather.checker import check_trace_invariants, predict_gathering_point
from dgather.geometry import extremal_frame

params = SimParams(n=12, algorithm="asyncnk", seed=11, k=None, motion="min-delta", delta=0.1)
out, trace = run_simulation(params)
start = trace.params.initial

# Everything happens inside the equilateral frame spanned by the top
# level and the two 60-degree lines through the outermost robots.
frame = extremal_frame(start)
print("frame apex      :", np.round(frame.apex, 3))
print("predicted point :", np.round(predict_gathering_point(start), 3))

hw = np.array([r.metrics.hw for r in trace.records])
vspan = np.array([r.metrics.vspan for r in trace.records])
print(out.status, "after", out.final_step, "steps")
print("hw below 0.1 at step   ", out.steps_to_hw_convergence)
print("vspan below 0.1 at step", out.steps_to_vspan_convergence)
print("final centroid  :", np.round(np.mean(out.final_positions, axis=0), 3))

# Sample the two widths every 10% of the run
idx = np.linspace(0, len(hw) - 1, 11).astype(int)
for i in idx:
    print(f"  step {i:6d}  hw={hw[i]:8.4f}  vspan={vspan[i]:8.4f}")

# Every mover climbs, never leaves the starting frame, and hw never grows.
report = check_trace_invariants(trace)
print(report.summary)
