"""Destination rule for four fully synchronous robots that each see two others.

Case labels returned by :func:`decide_42`:

``"1"``      nothing else visible, stay (gathering inferred)
``"2"``      one other position, go to the midpoint
``"3.1i"``   collinear view, observer strictly inside: midpoint of the two others
``"3.1e"``   collinear view, observer at an end: midpoint with the farther one
``"3.2.1"``  equilateral view: centroid
``"3.2.2w"`` isosceles with the observer at a 120 degree vertex: wait
``"3.2.2"``  other isosceles views: midpoint of the base
``"3.2.3"``  scalene view: midpoint of the longest side
``"x"``      more than two others visible (outside the model): stay
"""

from __future__ import annotations

from .geometry import (
    DEFAULT_TOL,
    Point,
    Tolerances,
    TriangleKind,
    centroid,
    classify_triangle,
    coincide,
    collinear,
    dist,
    midpoint,
)
from .model import Observation


def _strictly_between(p, a, b, tol: Tolerances) -> bool:
    """Is ``p`` (known collinear with ab) strictly inside segment ab?"""
    dx, dy = b[0] - a[0], b[1] - a[1]
    length = (dx * dx + dy * dy) ** 0.5
    along = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / length
    return tol.eps_coincide < along < length - tol.eps_coincide


def decide_42(obs: Observation, tol: Tolerances = DEFAULT_TOL) -> tuple[Point, str]:
    me = obs.self_pos
    others = obs.others
    if not others:
        return me, "1"
    if len(others) == 1:
        return midpoint(me, others[0]), "2"
    if len(others) > 2:
        return me, "x"

    b, c = others
    if collinear(me, b, c, tol):
        if _strictly_between(me, b, c, tol):
            return midpoint(b, c), "3.1i"
        db, dc = dist(me, b), dist(me, c)
        assert db != dc, "distinct collinear points cannot be equidistant from an end"
        return midpoint(me, b if db > dc else c), "3.1e"

    tri = classify_triangle(me, b, c, tol)
    if tri.kind is TriangleKind.EQUILATERAL:
        return centroid(me, b, c), "3.2.1"
    if tri.kind is TriangleKind.ISOSCELES:
        if coincide(tri.vertex, me, tol) and abs(tri.vertex_angle - 120.0) <= tol.eps_angle:
            return me, "3.2.2w"
        return midpoint(tri.base.a, tri.base.b), "3.2.2"
    return midpoint(tri.longest.a, tri.longest.b), "3.2.3"


def compute_destination_42(obs: Observation, tol: Tolerances = DEFAULT_TOL) -> Point:
    """Where a robot heads under the (4,2) rule, given its defected view."""
    return decide_42(obs, tol)[0]
