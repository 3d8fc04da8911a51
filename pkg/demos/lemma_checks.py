"""The two combinatorial facts behind the four-robot algorithm, checked by brute force.

Run with ``python demos/lemma_checks.py``.
"""

from dgather.checker import (
    check_collinear_midpoint_lemma,
    collinear_midpoint_suite,
    enumerate_view_assignments_42,
    longest_line_suite,
)
from dgather.model import Configuration

# Four robots on a line. Each one hides one of the other three, so there
# are 3**4 joint views. In every one of them two robots pick the same point.
line = Configuration(((0.0, 0.0), (1.0, 0.0), (3.0, 0.0), (6.0, 0.0)))
print(len(enumerate_view_assignments_42(line)), "joint views")
print(check_collinear_midpoint_lemma(line).summary)
print(collinear_midpoint_suite(200, seed=1).summary)

# Four points in convex position, no two sides equal: across the four
# triangles they form, at most three different segments are ever "longest".
print(longest_line_suite(2000, seed=1).summary)
