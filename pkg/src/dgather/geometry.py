"""Planar geometry kernel shared by both gathering algorithms.

All functions are pure. Points are ``Point(x, y)`` named tuples of floats;
anything accepting a point also accepts a plain ``(x, y)`` pair.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import InvalidGeometry, InvalidInput

SQRT3 = math.sqrt(3.0)
HALF_SQRT3 = SQRT3 / 2.0


class Point(NamedTuple):
    x: float
    y: float


class Segment(NamedTuple):
    a: Point
    b: Point

    @property
    def length(self) -> float:
        return dist(self.a, self.b)

    def canonical(self) -> "Segment":
        """Same segment with endpoints in lexicographic order."""
        return self if self.a <= self.b else Segment(self.b, self.a)


class Ray(NamedTuple):
    origin: Point
    direction: Point


@dataclass(frozen=True)
class Tolerances:
    """Numerical slack used by every predicate in the package.

    ``eps_level`` is relative: two heights belong to the same horizontal
    line when they differ by at most ``eps_level * max(1, |y|)``.
    """

    eps_coincide: float = 1e-12
    eps_collinear: float = 1e-9
    eps_len: float = 1e-9
    eps_angle: float = 1e-6
    eps_level: float = 1e-9

    def __post_init__(self):
        for name in ("eps_coincide", "eps_collinear", "eps_len", "eps_angle", "eps_level"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidInput(f"{name} must be a positive finite number, got {value!r}")

    def level_tol(self, y: float) -> float:
        return self.eps_level * max(1.0, abs(y))


DEFAULT_TOL = Tolerances()


class TriangleKind(enum.Enum):
    EQUILATERAL = "equilateral"
    ISOSCELES = "isosceles"
    SCALENE = "scalene"


@dataclass(frozen=True)
class TriangleClass:
    kind: TriangleKind
    vertex: Point | None = None
    base: Segment | None = None
    vertex_angle: float | None = None
    longest: Segment | None = None


@dataclass(frozen=True)
class ExtremalFrame:
    """The two closest 60-degree supporting lines of a point set.

    The left line has slope +sqrt(3) and is the set ``x - y/sqrt(3) = left_value``;
    the right line has slope -sqrt(3) and is ``x + y/sqrt(3) = right_value``.
    """

    left_anchor: Point
    right_anchor: Point
    left_value: float
    right_value: float
    apex: Point
    d_top: float
    top_y: float

    def contains(self, q, eps: float = 0.0) -> bool:
        """True when ``q`` lies weakly between the two lines (with slack ``eps``)."""
        return (q[0] - q[1] / SQRT3 >= self.left_value - eps
                and q[0] + q[1] / SQRT3 <= self.right_value + eps)

    def excess(self, q) -> float:
        """How far (in line-value units) ``q`` sits outside the frame; 0 inside."""
        return max(0.0,
                   self.left_value - (q[0] - q[1] / SQRT3),
                   (q[0] + q[1] / SQRT3) - self.right_value)


def _check_finite(*points) -> None:
    for p in points:
        if not (math.isfinite(p[0]) and math.isfinite(p[1])):
            raise InvalidGeometry(f"non-finite point {tuple(p)!r}")


def as_point(p) -> Point:
    return p if isinstance(p, Point) else Point(float(p[0]), float(p[1]))


def dist(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def coincide(a, b, tol: Tolerances = DEFAULT_TOL) -> bool:
    return dist(a, b) <= tol.eps_coincide


def midpoint(a, b) -> Point:
    _check_finite(a, b)
    return Point((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)


def centroid(a, b, c) -> Point:
    _check_finite(a, b, c)
    # Summation order is fixed so every robot gets the same bits.
    p, q, r = sorted((tuple(a), tuple(b), tuple(c)))
    return Point((p[0] + q[0] + r[0]) / 3.0, (p[1] + q[1] + r[1]) / 3.0)


def cross(o, a, b) -> float:
    """z-component of (a - o) x (b - o)."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def collinear(a, b, c, tol: Tolerances = DEFAULT_TOL) -> bool:
    scale = dist(a, b) * dist(a, c)
    return abs(cross(a, b, c)) <= tol.eps_collinear * max(1.0, scale)


def _lengths_equal(l1: float, l2: float, tol: Tolerances) -> bool:
    return abs(l1 - l2) <= tol.eps_len * max(l1, l2)


def vertex_angle(vertex, b1, b2) -> float:
    """Angle at ``vertex`` between the arms to ``b1`` and ``b2``, in degrees."""
    ux, uy = b1[0] - vertex[0], b1[1] - vertex[1]
    vx, vy = b2[0] - vertex[0], b2[1] - vertex[1]
    nu = math.hypot(ux, uy)
    nv = math.hypot(vx, vy)
    if nu == 0.0 or nv == 0.0:
        raise InvalidGeometry("vertex angle needs two non-degenerate arms")
    c = (ux * vx + uy * vy) / (nu * nv)
    return math.degrees(math.acos(min(1.0, max(-1.0, c))))


def classify_triangle(a, b, c, tol: Tolerances = DEFAULT_TOL) -> TriangleClass:
    """Equilateral, isosceles (with vertex and base) or scalene (with longest side)."""
    a, b, c = as_point(a), as_point(b), as_point(c)
    _check_finite(a, b, c)
    if coincide(a, b, tol) or coincide(b, c, tol) or coincide(a, c, tol) or collinear(a, b, c, tol):
        raise InvalidGeometry("degenerate triangle")
    # side i is opposite point i
    pts = (a, b, c)
    sides = (dist(b, c), dist(a, c), dist(a, b))
    eq = [_lengths_equal(sides[(i + 1) % 3], sides[(i + 2) % 3], tol) for i in range(3)]
    if all(eq):
        return TriangleClass(TriangleKind.EQUILATERAL)
    if any(eq):
        # the vertex is the point whose two incident sides match; with a
        # non-transitive tie pick the closest match
        candidates = [i for i in range(3) if eq[i]]
        v = min(candidates, key=lambda i: (abs(sides[(i + 1) % 3] - sides[(i + 2) % 3]), pts[i]))
        b1, b2 = pts[(v + 1) % 3], pts[(v + 2) % 3]
        return TriangleClass(
            TriangleKind.ISOSCELES,
            vertex=pts[v],
            base=Segment(b1, b2).canonical(),
            vertex_angle=vertex_angle(pts[v], b1, b2),
        )
    i = max(range(3), key=lambda k: sides[k])
    return TriangleClass(
        TriangleKind.SCALENE,
        longest=Segment(pts[(i + 1) % 3], pts[(i + 2) % 3]).canonical(),
    )


def equilateral_apex_above(a, b, tol: Tolerances = DEFAULT_TOL) -> Point:
    """Apex above a horizontal base ``ab`` of an equilateral triangle."""
    _check_finite(a, b)
    if coincide(a, b, tol):
        raise InvalidGeometry("equilateral apex needs two distinct base points")
    if abs(a[1] - b[1]) > tol.level_tol(max(abs(a[1]), abs(b[1]))):
        raise InvalidGeometry("equilateral apex needs a horizontal base")
    m = midpoint(a, b)
    return Point(m.x, m.y + HALF_SQRT3 * dist(a, b))


def go_lines(p) -> tuple[Ray, Ray]:
    """The two upward 60-degree rays from ``p`` (right-leaning first)."""
    p = as_point(p)
    _check_finite(p)
    return Ray(p, Point(0.5, HALF_SQRT3)), Ray(p, Point(-0.5, HALF_SQRT3))


def go_line_meets_horizontal(p, y: float) -> tuple[Point, Point]:
    """Where the right and left Go-Lines of ``p`` cross the line at height ``y``."""
    if not y > p[1]:
        raise InvalidGeometry("Go-Lines only reach heights strictly above the origin")
    run = (y - p[1]) / SQRT3
    return Point(p[0] + run, y), Point(p[0] - run, y)


def go_line_meets_vertical(p, x: float, tol: Tolerances = DEFAULT_TOL) -> Point:
    """Where the vertical line through ``x`` meets the Go-Line of ``p`` on that side."""
    if abs(x - p[0]) <= tol.eps_coincide:
        raise InvalidGeometry("vertical line through the origin has no Go-Line crossing")
    return Point(x, p[1] + SQRT3 * abs(x - p[0]))


def extremal_frame(points: Iterable) -> ExtremalFrame:
    pts = [as_point(p) for p in points]
    if not pts:
        raise InvalidInput("extremal frame of an empty point set")
    _check_finite(*pts)
    left = min(pts, key=lambda q: (q.x - q.y / SQRT3, q))
    right = max(pts, key=lambda q: (q.x + q.y / SQRT3, q))
    lv = left.x - left.y / SQRT3
    rv = right.x + right.y / SQRT3
    top = max(q.y for q in pts)
    apex = Point((lv + rv) / 2.0, HALF_SQRT3 * (rv - lv))
    d_top = (rv - top / SQRT3) - (lv + top / SQRT3)
    return ExtremalFrame(left, right, lv, rv, apex, d_top, top)


def convex_hull(points: Sequence, tol: Tolerances = DEFAULT_TOL) -> list[Point]:
    """Counter-clockwise hull vertices by Andrew's monotone chain.

    Nearly collinear turns (within the collinearity tolerance) are dropped.
    """
    pts = sorted(set(as_point(p) for p in points))
    if len(pts) <= 2:
        return pts

    def turn_ok(o, a, b):
        scale = dist(o, a) * dist(o, b)
        return cross(o, a, b) > tol.eps_collinear * max(1.0, scale)

    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and not turn_ok(lower[-2], lower[-1], p):
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and not turn_ok(upper[-2], upper[-1], p):
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def polygon_area(poly: Sequence) -> float:
    if len(poly) < 3:
        return 0.0
    s = 0.0
    for i in range(len(poly)):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % len(poly)]
        s += x1 * y2 - x2 * y1
    return abs(s) / 2.0


class HullMetrics(NamedTuple):
    span: float
    area: float
    hw: float
    vspan: float


def hull_metrics(points: Sequence, tol: Tolerances = DEFAULT_TOL) -> HullMetrics:
    """Diameter, hull area, horizontal width and vertical span of a point set."""
    if len(points) == 0:
        raise InvalidInput("metrics of an empty point set")
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    n = len(points)
    if n <= 8:
        span = 0.0
        for i in range(n):
            xi, yi = xs[i], ys[i]
            for j in range(i + 1, n):
                d = math.hypot(xs[j] - xi, ys[j] - yi)
                if d > span:
                    span = d
    else:
        x = np.asarray(xs)
        y = np.asarray(ys)
        span = float(np.sqrt(((x[:, None] - x) ** 2 + (y[:, None] - y) ** 2).max()))
    area = polygon_area(convex_hull(points, tol))
    return HullMetrics(span, area, max(xs) - min(xs), max(ys) - min(ys))
