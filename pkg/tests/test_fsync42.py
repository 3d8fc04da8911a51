import math

import pytest
from hypothesis import assume, given, strategies as st

from dgather.errors import InvalidGeometry
from dgather.fsync42 import compute_destination_42, decide_42
from dgather.geometry import SQRT3, convex_hull, cross
from dgather.model import Observation


def dest(me, *others):
    return decide_42(Observation(me, tuple(others)))


def close(p, q, tol=1e-12):
    return math.hypot(p[0] - q[0], p[1] - q[1]) <= tol


@pytest.mark.parametrize("me, others, want, case", [
    ((5, 5), (), (5, 5), "1"),
    ((0, 0), ((2, 0),), (1, 0), "2"),
    ((1, 0), ((0, 0), (3, 0)), (1.5, 0), "3.1i"),
    ((0, 0), ((1, 0), (3, 0)), (1.5, 0), "3.1e"),
    ((0, 0), ((2, 0), (1, SQRT3)), (1, SQRT3 / 3), "3.2.1"),
    ((0, SQRT3), ((-3, 0), (3, 0)), (0, SQRT3), "3.2.2w"),
    ((2, 3), ((0, 0), (4, 0)), (2, 0), "3.2.2"),
    ((0, 0), ((4, 0), (1, 1)), (2, 0), "3.2.3"),
])
def test_cases(me, others, want, case):
    got, label = dest(me, *others)
    assert label == case
    assert close(got, want)


def test_base_vertex_of_120_isosceles_moves():
    # the two base robots see the 120 degree vertex and move to the base midpoint
    got, label = dest((-3, 0), (0, SQRT3), (3, 0))
    assert label == "3.2.2" and close(got, (0, 0))


def test_more_than_two_others_stays():
    assert dest((0, 0), (1, 0), (2, 0), (0, 5)) == ((0, 0), "x")


def test_compute_destination_wrapper():
    assert compute_destination_42(Observation((0, 0), ((2, 0),))) == (1, 0)


coord = st.floats(min_value=-50, max_value=50, allow_nan=False).map(lambda v: round(v, 3))
pt = st.tuples(coord, coord)


def _in_hull(q, pts, slack=1e-9):
    hull = convex_hull(pts)
    if len(hull) < 3:
        a, b = min(pts), max(pts)
        length = math.dist(a, b)
        if length == 0:
            return math.dist(q, a) <= slack
        return math.dist(a, q) + math.dist(q, b) <= length + slack * max(1, length)
    scale = max(1.0, max(math.dist(hull[0], h) for h in hull))
    return all(cross(hull[i], hull[(i + 1) % len(hull)], q) >= -slack * scale * scale
               for i in range(len(hull)))


@given(pt, st.lists(pt, min_size=0, max_size=2, unique=True))
def test_destination_inside_observed_hull(me, others):
    assume(all(o != me for o in others))
    got, _ = dest(me, *others)
    assert _in_hull(got, [me, *others])


@given(pt, pt, pt)
def test_order_of_others_does_not_matter(me, b, c):
    assume(len({me, b, c}) == 3)
    assert dest(me, b, c)[0] == dest(me, c, b)[0]


@given(pt, pt, pt, st.floats(0, 2 * math.pi), pt)
def test_rigid_motion_equivariance(me, b, c, theta, shift):
    assume(len({me, b, c}) == 3)
    # keep clear of the tolerance boundaries where a rotation may flip a case
    sides = sorted([math.dist(me, b), math.dist(me, c), math.dist(b, c)])
    assume(sides[0] > 1e-2 and sides[1] - sides[0] > 1e-4 and sides[2] - sides[1] > 1e-4)
    assume(abs(cross(me, b, c)) > 1e-3 * sides[2] ** 2 or abs(cross(me, b, c)) == 0)
    ct, st_ = math.cos(theta), math.sin(theta)

    def t(p):
        return (ct * p[0] - st_ * p[1] + shift[0], st_ * p[0] + ct * p[1] + shift[1])

    try:
        got = dest(t(me), t(b), t(c))[0]
        ref = dest(me, b, c)[0]
    except InvalidGeometry:
        return
    assert close(got, t(ref), 1e-7 * max(1.0, sides[2]))
