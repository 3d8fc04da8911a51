"""Hand-built (4,2) scenarios used by tests, demos and the CLI."""

from __future__ import annotations

from .geometry import SQRT3, Point, midpoint


def centroid_triangle() -> tuple[Point, ...]:
    """Equilateral triangle of circumradius 2 plus a robot at its centre."""
    return (Point(0.0, 2.0), Point(-SQRT3, -1.0), Point(SQRT3, -1.0), Point(0.0, 0.0))


def centroid_triangle_script() -> list[dict]:
    """Views that make the centre robot and one corner robot wait.

    Round 1: the corner robot 0 and the centre robot 3 see the other two
    corners; robots 1 and 2 see corner 0 and the centre. Round 2: the two
    robots now stacked at the centre see the two moved corners.
    """
    p1, p2, p3, p4 = centroid_triangle()
    a, b = midpoint(p1, p2), midpoint(p1, p3)
    view = lambda *ps: [[p.x, p.y] for p in ps]  # noqa: E731
    return [
        {"step": 1, "robot": 0, "view": view(p2, p3)},
        {"step": 1, "robot": 1, "view": view(p1, p4)},
        {"step": 1, "robot": 2, "view": view(p1, p4)},
        {"step": 1, "robot": 3, "view": view(p2, p3)},
        {"step": 2, "robot": 0, "view": view(a, b)},
        {"step": 2, "robot": 3, "view": view(a, b)},
    ]


def centroid_triangle_config() -> dict:
    """Run configuration (SimParams fields) for the scripted scenario."""
    return {"n": 4, "algorithm": "fsync42", "k": 2, "motion": "full",
            "visibility": "scripted", "script": centroid_triangle_script(),
            "initial": [[p.x, p.y] for p in centroid_triangle()]}
