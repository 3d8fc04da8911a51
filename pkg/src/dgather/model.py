"""Configurations, multiplicity collapse and defected observations.

Robot ids live only on this side of the anonymity boundary: the algorithms
receive an :class:`Observation` and nothing else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidInput
from .geometry import DEFAULT_TOL, Point, Tolerances, as_point, dist


@dataclass(frozen=True)
class Configuration:
    positions: tuple[Point, ...]

    def __post_init__(self):
        pts = tuple(as_point(p) for p in self.positions)
        if len(pts) < 2:
            raise InvalidInput("a configuration needs at least two robots")
        for p in pts:
            if not (math.isfinite(p.x) and math.isfinite(p.y)):
                raise InvalidInput(f"non-finite robot position {p!r}")
        object.__setattr__(self, "positions", pts)

    @classmethod
    def of(cls, points: Iterable) -> "Configuration":
        return cls(tuple(points))

    @property
    def n(self) -> int:
        return len(self.positions)

    def __len__(self) -> int:
        return len(self.positions)

    def __getitem__(self, i: int) -> Point:
        return self.positions[i]


@dataclass(frozen=True)
class Observation:
    """What one activated robot sees: itself plus distinct other positions."""

    self_pos: Point
    others: tuple[Point, ...] = ()


@dataclass(frozen=True)
class VisibilityBudget:
    """How many other positions a robot may be shown.

    ``k=None`` means a fresh K is drawn uniformly from ``[1, max(1, N-2)]``
    for every activation.
    """

    k: int | None = None

    @property
    def per_activation(self) -> bool:
        return self.k is None

    def validate(self, n: int) -> None:
        if self.k is None:
            return
        if not 1 <= self.k <= max_k(n):
            raise InvalidInput(f"K={self.k} outside [1, {max_k(n)}] for N={n}")


def max_k(n: int) -> int:
    """Largest legal visibility bound; the rendezvous case N=2 uses K=1."""
    return max(1, n - 2)


class Clustering:
    """Positions of a configuration grouped into distinct points.

    Two robots share a cluster when they lie within ``eps_coincide`` of the
    cluster's first member (its representative). Representatives are listed
    in lexicographic order.
    """

    __slots__ = ("reps", "label", "sizes")

    def __init__(self, positions: Sequence, tol: Tolerances = DEFAULT_TOL):
        eps = tol.eps_coincide
        order = sorted(range(len(positions)), key=lambda i: (positions[i][0], positions[i][1]))
        reps: list[Point] = []
        label = [0] * len(positions)
        for i in order:
            p = positions[i]
            found = -1
            j = len(reps) - 1
            # reps are sorted by x, so only a short tail can be within eps
            while j >= 0 and reps[j][0] >= p[0] - eps:
                if dist(reps[j], p) <= eps:
                    found = j
                    break
                j -= 1
            if found < 0:
                reps.append(as_point(p))
                found = len(reps) - 1
            label[i] = found
        sizes = [0] * len(reps)
        for c in label:
            sizes[c] += 1
        self.reps = reps
        self.label = label
        self.sizes = sizes

    @property
    def distinct(self) -> int:
        return len(self.reps)

    def candidates(self, robot: int) -> list[Point]:
        """Distinct positions occupied by robots other than ``robot``."""
        own = self.label[robot]
        if self.sizes[own] > 1:
            return list(self.reps)
        return [p for c, p in enumerate(self.reps) if c != own]


def distinct_positions(config: Configuration, exclude: int,
                       tol: Tolerances = DEFAULT_TOL) -> list[Point]:
    """Distinct points occupied by the robots other than ``exclude``.

    The excluded robot's own point is included when another robot shares it.
    """
    if not 0 <= exclude < config.n:
        raise InvalidInput(f"robot id {exclude} out of range for N={config.n}")
    return Clustering(config.positions, tol).candidates(exclude)


def build_observation(self_pos, chosen: Iterable, tol: Tolerances = DEFAULT_TOL) -> Observation:
    """Drop sightings that coincide with the observer; they carry no information."""
    me = as_point(self_pos)
    eps = tol.eps_coincide
    others = tuple(as_point(p) for p in chosen if dist(p, me) > eps)
    return Observation(me, others)
