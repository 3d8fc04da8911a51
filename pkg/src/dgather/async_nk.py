"""Go-Line destination rule for asynchronous robots that agree on north.

Robots only share the direction of the y-axis. Decisions use heights and
horizontal order; the one place the handedness of the x-axis matters is
breaking exact ties, which is done towards the robot's *local* left
(``chirality=+1`` means local left is global -x).

Case labels returned by :func:`decide_nk`:

``"A"``        nothing else visible, stay
``"B1.1"``     topmost in view but sees someone below: wait
``"B1.2i"``    alone on one line with neighbours on both sides: wait
``"B1.2e"``    alone on one line at an end: climb to the equilateral apex
``"B2.1v"``    single topmost point straight above: go to it
``"B2.1o"``    single topmost point outside the Go-Line wedge: nearer crossing
``"B2.1p"``    single topmost point inside the wedge: Go-Line under it
``"B2.2a"``    both crossings within the visible top span: tie-break
``"B2.2b"``    exactly one crossing within the span: take it
``"B2.2c"``    span strictly inside the wedge: Go-Line under the nearer corner
``"B2.2s"``    span entirely to one side of the wedge: crossing nearer the span
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .errors import InvalidInput
from .geometry import (
    DEFAULT_TOL,
    Point,
    Tolerances,
    as_point,
    dist,
    go_line_meets_horizontal,
    go_line_meets_vertical,
)
from .model import Observation


class Level(NamedTuple):
    y: float
    points: tuple[Point, ...]


@dataclass(frozen=True)
class LevelView:
    """Observed points grouped into horizontal lines, north first.

    ``self_level`` is 1-based, matching the usual L_1, L_2, ... numbering.
    """

    lines: tuple[Level, ...]
    self_level: int

    @property
    def top(self) -> Level:
        return self.lines[0]


def compute_levels(obs: Observation, tol: Tolerances = DEFAULT_TOL) -> LevelView:
    me = obs.self_pos
    pts = sorted((me, *obs.others), key=lambda p: (-p[1], p[0]))
    lines: list[Level] = []
    group: list[Point] = []
    anchor = 0.0
    self_level = 0
    for p in pts:
        if group and p[1] < anchor - tol.level_tol(anchor):
            lines.append(Level(anchor, tuple(sorted(group))))
            group = []
        if not group:
            anchor = p[1]
        group.append(p)
        if p is me:
            self_level = len(lines) + 1
    lines.append(Level(anchor, tuple(sorted(group))))
    return LevelView(tuple(lines), self_level)


def corner_points(line: Sequence) -> tuple[Point, Point]:
    """Leftmost and rightmost points of one horizontal line."""
    if not line:
        raise InvalidInput("corner points of an empty line")
    return min(line), max(line)


def _local_left(left: Point, right: Point, chirality: int) -> Point:
    return left if chirality >= 0 else right


def _nearer(target, left: Point, right: Point, chirality: int) -> Point:
    dl, dr = dist(target, left), dist(target, right)
    if dl < dr:
        return left
    if dr < dl:
        return right
    return _local_left(left, right, chirality)


def decide_nk(obs: Observation, chirality: int = 1,
              tol: Tolerances = DEFAULT_TOL) -> tuple[Point, str]:
    obs = _normalized(obs)
    me = obs.self_pos
    if not obs.others:
        return me, "A"
    view = compute_levels(obs, tol)

    if view.self_level == 1:
        if len(view.lines) > 1:
            return me, "B1.1"
        line = view.top.points
        eps = tol.eps_coincide
        has_left = any(p[0] < me[0] - eps for p in line)
        has_right = any(p[0] > me[0] + eps for p in line)
        if has_left and has_right:
            return me, "B1.2i"
        partner = max((p for p in line if p is not me), key=lambda p: (dist(p, me), p))
        if abs(partner[0] - me[0]) <= eps:
            return me, "B1.2e"  # level with a sighting straight above or below: nothing to climb to
        # apex of the equilateral triangle on (me, partner), reached along my
        # own Go-Line so that a base off level by < eps_level cannot tilt it
        return go_line_meets_vertical(me, 0.5 * (me[0] + partner[0]), tol), "B1.2e"

    top = view.top
    y1 = top.y
    g_right, g_left = go_line_meets_horizontal(me, y1)
    c_left, c_right = corner_points(top.points)
    eps = tol.eps_coincide

    if len(top.points) == 1:
        q = top.points[0]
        if abs(q[0] - me[0]) <= eps:
            return q, "B2.1v"
        if q[0] < g_left.x or q[0] > g_right.x:
            return _nearer(q, g_left, g_right, chirality), "B2.1o"
        return go_line_meets_vertical(me, q[0], tol), "B2.1p"

    left_in = c_left.x <= g_left.x <= c_right.x
    right_in = c_left.x <= g_right.x <= c_right.x
    if left_in and right_in:
        n = len(top.points)
        cx = sum(p[0] for p in top.points) / n
        cy = sum(p[1] for p in top.points) / n
        return _nearer((cx, cy), g_left, g_right, chirality), "B2.2a"
    if left_in:
        return g_left, "B2.2b"
    if right_in:
        return g_right, "B2.2b"
    if g_left.x < c_left.x and g_right.x > c_right.x:
        cand_l = _under_corner(me, c_left, tol)
        cand_r = _under_corner(me, c_right, tol)
        return _nearer(me, cand_l, cand_r, chirality), "B2.2c"
    # whole visible span lies beyond one Go-Line
    return (g_left if c_right.x < g_left.x else g_right), "B2.2s"


def _normalized(obs: Observation) -> Observation:
    if type(obs.self_pos) is Point and all(type(p) is Point for p in obs.others):
        return obs
    return Observation(as_point(obs.self_pos), tuple(as_point(p) for p in obs.others))


def _under_corner(me: Point, corner: Point, tol: Tolerances) -> Point:
    """Go-Line point below ``corner``; the corner itself when straight above."""
    if abs(corner[0] - me[0]) <= tol.eps_coincide:
        return corner
    return go_line_meets_vertical(me, corner[0], tol)


def compute_destination_nk(obs: Observation, chirality: int = 1,
                           tol: Tolerances = DEFAULT_TOL) -> Point:
    """Where a robot heads under the Go-Line rule, given its defected view."""
    return decide_nk(obs, chirality, tol)[0]
