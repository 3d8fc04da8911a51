"""Adversarial choices: what a robot sees, how far it gets, and who moves.

Each policy is a small stateful object bound to one simulation. Seeded
policies draw from :mod:`dgather.rng` sub-streams keyed by step and robot,
so a replay with the same seed reproduces every choice exactly.
"""

from __future__ import annotations

import itertools
import json
from pathlib import Path
from typing import Iterable, Sequence

from .errors import InvalidInput, ScriptError
from .geometry import DEFAULT_TOL, Point, Tolerances, as_point, dist
from .rng import Stream


# --- visibility ---------------------------------------------------------


class VisibilityPolicy:
    """Chooses the defected view; legal-size handling lives here."""

    name = "abstract"

    def choose(self, observer: int, self_pos: Point, candidates: Sequence[Point],
               k: int, step: int) -> list[Point]:
        if k < 1:
            raise InvalidInput("visibility bound must be at least 1")
        cands = sorted(candidates)
        if len(cands) <= k:
            return cands
        return self.pick(observer, self_pos, cands, k, step)

    def pick(self, observer, self_pos, candidates, k, step) -> list[Point]:
        raise NotImplementedError


class SeededRandom(VisibilityPolicy):
    """Uniform among all size-k subsets."""

    name = "random"

    def __init__(self, seed: int):
        self.seed = seed

    def pick(self, observer, self_pos, candidates, k, step):
        return Stream(self.seed, "visibility", step, observer).sample(candidates, k)


class HideFarthest(VisibilityPolicy):
    """Show the k nearest positions."""

    name = "hide-farthest"

    def pick(self, observer, self_pos, candidates, k, step):
        return sorted(candidates, key=lambda p: (dist(p, self_pos), p))[:k]


class HideNearest(VisibilityPolicy):
    """Show the k farthest positions."""

    name = "hide-nearest"

    def pick(self, observer, self_pos, candidates, k, step):
        return sorted(candidates, key=lambda p: (-dist(p, self_pos), p))[:k]


class Scripted(VisibilityPolicy):
    """Replays explicit per-(step, robot) views.

    Records are ``{"step": s, "robot": i, "view": [[x, y], ...]}``. A record
    is only required when the robot actually has a choice to be made.
    """

    name = "scripted"

    def __init__(self, records: Iterable[dict], tol: Tolerances = DEFAULT_TOL):
        self.tol = tol
        self.records: list[dict] = []
        self.table: dict[tuple[int, int], list[Point]] = {}
        for rec in records:
            try:
                key = (int(rec["step"]), int(rec["robot"]))
                view = [as_point(p) for p in rec["view"]]
            except (KeyError, TypeError, ValueError, IndexError) as exc:
                raise ScriptError(f"malformed script record {rec!r}") from exc
            if key in self.table:
                raise ScriptError(f"duplicate script record for step {key[0]}, robot {key[1]}")
            self.table[key] = view
            self.records.append({"step": key[0], "robot": key[1],
                                 "view": [[p.x, p.y] for p in view]})

    @classmethod
    def from_file(cls, path, tol: Tolerances = DEFAULT_TOL) -> "Scripted":
        return cls(load_script(path), tol)

    def pick(self, observer, self_pos, candidates, k, step):
        key = (step, observer)
        if key not in self.table:
            raise ScriptError(f"no scripted view for step {step}, robot {observer}")
        chosen: list[Point] = []
        for p in self.table[key]:
            match = [c for c in candidates if dist(c, p) <= self.tol.eps_coincide]
            if not match:
                raise ScriptError(f"step {step}, robot {observer}: {tuple(p)} is not a visible position")
            if match[0] in chosen:
                raise ScriptError(f"step {step}, robot {observer}: {tuple(p)} listed twice")
            chosen.append(match[0])
        if len(chosen) != k:
            raise ScriptError(f"step {step}, robot {observer}: view has {len(chosen)} points, need {k}")
        return chosen


class Exhaustive(VisibilityPolicy):
    """Driven externally: ``selection[robot]`` indexes into :meth:`options`."""

    name = "exhaustive"

    def __init__(self):
        self.selection: dict[int, int] = {}

    @staticmethod
    def options(candidates: Sequence[Point], k: int) -> list[tuple[Point, ...]]:
        cands = sorted(candidates)
        if len(cands) <= k:
            return [tuple(cands)]
        return list(itertools.combinations(cands, k))

    def pick(self, observer, self_pos, candidates, k, step):
        return list(self.options(candidates, k)[self.selection.get(observer, 0)])


def load_script(path) -> list[dict]:
    records = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ScriptError(f"{path}:{lineno}: {exc}") from exc
    return records


def choose_view(policy: VisibilityPolicy, observer: int, self_pos, candidates,
                k: int, step: int) -> list[Point]:
    return policy.choose(observer, as_point(self_pos), candidates, k, step)


# --- motion ---------------------------------------------------------------


def _along(start: Point, dest: Point, d: float, length: float) -> Point:
    f = d / length
    return Point(start[0] + (dest[0] - start[0]) * f, start[1] + (dest[1] - start[1]) * f)


class MotionPolicy:
    """Where a move toward ``dest`` is cut short (never before ``delta``)."""

    name = "abstract"

    def stop(self, start: Point, dest: Point, delta: float, step: int, robot: int) -> Point:
        if not delta > 0:
            raise InvalidInput("delta must be positive")
        length = dist(start, dest)
        if length <= delta:
            return dest
        return self.truncate(start, dest, delta, length, step, robot)

    def truncate(self, start, dest, delta, length, step, robot) -> Point:
        raise NotImplementedError


class FullMove(MotionPolicy):
    name = "full"

    def truncate(self, start, dest, delta, length, step, robot):
        return dest


class MinDelta(MotionPolicy):
    name = "min-delta"

    def truncate(self, start, dest, delta, length, step, robot):
        return _along(start, dest, delta, length)


class SeededFraction(MotionPolicy):
    """Stop distance uniform in [delta, length]."""

    name = "fraction"

    def __init__(self, seed: int):
        self.seed = seed

    def truncate(self, start, dest, delta, length, step, robot):
        d = Stream(self.seed, "motion", step, robot).uniform(delta, length)
        if d >= length:
            return dest
        return _along(start, dest, d, length)


def stop_point(policy: MotionPolicy, start, dest, delta: float, step: int = 0,
               robot: int = 0) -> Point:
    return policy.stop(as_point(start), as_point(dest), delta, step, robot)


# --- scheduling ------------------------------------------------------------


class Scheduler:
    name = "abstract"

    def active(self, step: int, n: int) -> list[int]:
        raise NotImplementedError


class FSync(Scheduler):
    name = "fsync"

    def active(self, step, n):
        return list(range(n))


class RoundRobin(Scheduler):
    """Robot ``(step - 1) mod N`` at steps 1, 2, ..."""

    name = "round-robin"

    def active(self, step, n):
        return [(step - 1) % n]


class SeededSubset(Scheduler):
    """Each robot joins with probability ``p``; no robot idles more than ``fairness`` steps.

    Must be queried with consecutive step numbers (it tracks idle counts).
    """

    name = "subset"

    def __init__(self, seed: int, p: float = 0.5, fairness: int | None = None):
        if not 0 < p <= 1:
            raise InvalidInput("activation probability must be in (0, 1]")
        if fairness is not None and fairness < 1:
            raise InvalidInput("fairness bound must be at least 1")
        self.seed = seed
        self.p = p
        self.fairness = fairness
        self.idle: list[int] | None = None

    def active(self, step, n):
        if self.idle is None:
            self.idle = [0] * n
        bound = self.fairness if self.fairness is not None else 4 * n
        streams = [Stream(self.seed, "schedule", step, i) for i in range(n)]
        chosen: list[int] = []
        for _attempt in range(64):
            chosen = [i for i in range(n) if streams[i].random() < self.p]
            if chosen:
                break
        else:
            chosen = [Stream(self.seed, "schedule", step, -1).randbelow(n)]
        picked = set(chosen)
        picked.update(i for i in range(n) if self.idle[i] >= bound)
        for i in range(n):
            self.idle[i] = 0 if i in picked else self.idle[i] + 1
        return sorted(picked)


def next_active_set(scheduler: Scheduler, step: int, n: int) -> list[int]:
    if n < 2:
        raise InvalidInput("need at least two robots")
    return scheduler.active(step, n)


# --- factories ---------------------------------------------------------------

VISIBILITY = ("random", "hide-farthest", "hide-nearest", "scripted", "exhaustive")
MOTIONS = ("full", "min-delta", "fraction")
SCHEDULERS = ("fsync", "subset", "round-robin")


def make_visibility(name: str, seed: int, script=None, tol: Tolerances = DEFAULT_TOL) -> VisibilityPolicy:
    if name == "random":
        return SeededRandom(seed)
    if name == "hide-farthest":
        return HideFarthest()
    if name == "hide-nearest":
        return HideNearest()
    if name == "scripted":
        if script is None:
            raise InvalidInput("scripted visibility needs a script")
        return Scripted(script, tol)
    if name == "exhaustive":
        return Exhaustive()
    raise InvalidInput(f"unknown visibility policy {name!r}")


def make_motion(name: str, seed: int) -> MotionPolicy:
    if name == "full":
        return FullMove()
    if name == "min-delta":
        return MinDelta()
    if name == "fraction":
        return SeededFraction(seed)
    raise InvalidInput(f"unknown motion policy {name!r}")


def make_scheduler(name: str, seed: int, p: float = 0.5, fairness: int | None = None) -> Scheduler:
    if name == "fsync":
        return FSync()
    if name == "round-robin":
        return RoundRobin()
    if name == "subset":
        return SeededSubset(seed, p, fairness)
    raise InvalidInput(f"unknown scheduler {name!r}")


def draw_k(seed: int, step: int, robot: int, n: int) -> int:
    """Per-activation visibility bound, uniform in [1, max(1, N-2)]."""
    hi = max(1, n - 2)
    if hi == 1:
        return 1
    return Stream(seed, "k", step, robot).randint(1, hi)
