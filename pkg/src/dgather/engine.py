"""Deterministic Look-Compute-Move simulation loop.

One call to :meth:`Simulation.step` is one round (FSYNC) or one asynchronous
step: the scheduler picks who is active, every active robot looks at the
same pre-step configuration, computes, and the truncated moves are applied
together at the end of the step.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any

from . import adversary
from .async_nk import decide_nk
from .errors import DGatherError, InvalidInput
from .fsync42 import decide_42
from .geometry import DEFAULT_TOL, HullMetrics, Point, Tolerances, as_point, dist, hull_metrics
from .model import Clustering, Configuration, build_observation, max_k
from .rng import Stream

ALGORITHMS = ("fsync42", "asyncnk")
TRACE_LEVELS = ("full", "metrics")

GATHERED = "GatheredExact"
CONVERGED = "Converged"
STEP_LIMIT = "StepLimit"
VIOLATION = "InvariantViolation"

MOTION_SLACK = 1e-12


@dataclass
class SimParams:
    n: int
    algorithm: str = "asyncnk"
    k: int | None = None
    delta: float = 0.1
    scheduler: str | None = None
    activation_p: float = 0.5
    fairness: int | None = None
    visibility: str = "random"
    motion: str = "min-delta"
    seed: int = 0
    max_steps: int = 10_000
    threshold: float = 0.1
    tolerances: Tolerances = DEFAULT_TOL
    chirality: tuple[int, ...] | None = None
    initial: tuple[Point, ...] | None = None
    script: list[dict] | None = None
    sequential: bool = False
    online_checks: bool = True
    trace_level: str = "full"
    extent: float = 10.0

    def resolved(self) -> "SimParams":
        """Copy with every default made explicit, validated."""
        p = dataclasses.replace(self)
        if p.algorithm not in ALGORITHMS:
            raise InvalidInput(f"unknown algorithm {p.algorithm!r}")
        if p.algorithm == "fsync42":
            if p.n not in (2, 4):
                raise InvalidInput("fsync42 runs need N=4 (or the N=2 rendezvous case)")
            if p.k is None:
                p.k = min(2, p.n - 1)
            if p.k != min(2, p.n - 1):
                raise InvalidInput("fsync42 runs need K=2 (K=1 when N=2)")
            if p.scheduler is None:
                p.scheduler = "fsync"
            if p.scheduler != "fsync":
                raise InvalidInput("fsync42 runs need the fsync scheduler")
        else:
            if p.n < 2:
                raise InvalidInput("need at least two robots")
            if p.k is not None and not 1 <= p.k <= max_k(p.n):
                raise InvalidInput(f"K={p.k} outside [1, {max_k(p.n)}] for N={p.n}")
            if p.scheduler is None:
                p.scheduler = "subset"
        if p.scheduler not in adversary.SCHEDULERS:
            raise InvalidInput(f"unknown scheduler {p.scheduler!r}")
        if p.visibility not in adversary.VISIBILITY or p.visibility == "exhaustive":
            raise InvalidInput(f"visibility policy {p.visibility!r} cannot drive a run")
        if p.visibility == "scripted" and p.script is None:
            raise InvalidInput("scripted visibility needs a script")
        if p.motion not in adversary.MOTIONS:
            raise InvalidInput(f"unknown motion policy {p.motion!r}")
        if not (p.delta > 0 and math.isfinite(p.delta)):
            raise InvalidInput("delta must be a positive finite number")
        if not p.threshold > 0:
            raise InvalidInput("threshold must be positive")
        if p.max_steps < 0:
            raise InvalidInput("max_steps must be non-negative")
        if p.trace_level not in TRACE_LEVELS:
            raise InvalidInput(f"unknown trace level {p.trace_level!r}")
        if p.scheduler == "subset" and p.fairness is None:
            p.fairness = 4 * p.n
        if p.chirality is None:
            p.chirality = (1,) * p.n
        p.chirality = tuple(1 if c >= 0 else -1 for c in p.chirality)
        if len(p.chirality) != p.n:
            raise InvalidInput("one chirality flag per robot")
        if p.initial is None:
            p.initial = random_initial(p.n, p.seed, p.extent)
        p.initial = tuple(as_point(q) for q in p.initial)
        if len(p.initial) != p.n:
            raise InvalidInput(f"initial configuration has {len(p.initial)} robots, expected {p.n}")
        Configuration(p.initial)
        return p

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["k"] = "random" if self.k is None else self.k
        d["tolerances"] = dataclasses.asdict(self.tolerances)
        d["chirality"] = None if self.chirality is None else list(self.chirality)
        d["initial"] = None if self.initial is None else [[q[0], q[1]] for q in self.initial]
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SimParams":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise InvalidInput(f"unknown parameter(s): {', '.join(sorted(unknown))}")
        d = dict(d)
        if d.get("k") in ("random", None):
            d["k"] = None
        elif "k" in d:
            d["k"] = int(d["k"])
        if isinstance(d.get("tolerances"), dict):
            d["tolerances"] = Tolerances(**d["tolerances"])
        if d.get("chirality") is not None:
            d["chirality"] = tuple(int(c) for c in d["chirality"])
        if d.get("initial") is not None:
            d["initial"] = tuple(Point(float(q[0]), float(q[1])) for q in d["initial"])
        if "n" not in d:
            raise InvalidInput("parameter 'n' is required")
        return cls(**d)


def random_initial(n: int, seed: int, extent: float = 10.0) -> tuple[Point, ...]:
    """Uniform positions in [0, extent]^2."""
    pts = []
    for i in range(n):
        s = Stream(seed, "init", 0, i)
        pts.append(Point(s.uniform(0.0, extent), s.uniform(0.0, extent)))
    return tuple(pts)


@dataclass
class Move:
    robot: int
    k: int
    others: tuple[Point, ...]
    dest: Point
    stop: Point
    case: str

    def to_json(self) -> dict:
        return {"robot": self.robot, "k": self.k,
                "others": [[p[0], p[1]] for p in self.others],
                "dest": [self.dest[0], self.dest[1]],
                "stop": [self.stop[0], self.stop[1]],
                "case": self.case}


@dataclass
class StepRecord:
    step: int
    active: list[int]
    metrics: HullMetrics
    moves: list[Move] | None = None
    positions: tuple[Point, ...] | None = None

    def to_json(self) -> dict:
        d: dict[str, Any] = {"type": "step", "step": self.step, "active": list(self.active)}
        if self.moves is not None:
            d["moves"] = [m.to_json() for m in self.moves]
        d["metrics"] = {"span": self.metrics.span, "hull_area": self.metrics.area,
                        "hw": self.metrics.hw, "vspan": self.metrics.vspan}
        if self.positions is not None:
            d["positions"] = [[p[0], p[1]] for p in self.positions]
        return d


@dataclass
class Outcome:
    status: str
    final_step: int
    final_positions: tuple[Point, ...]
    gathering_point: Point | None = None
    steps_to_hw_convergence: int | None = None
    steps_to_vspan_convergence: int | None = None
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status in (GATHERED, CONVERGED)

    def to_json(self) -> dict:
        return {"type": "outcome", "status": self.status, "final_step": self.final_step,
                "final_positions": [[p[0], p[1]] for p in self.final_positions],
                "gathering_point": None if self.gathering_point is None else list(self.gathering_point),
                "steps_to_hw_convergence": self.steps_to_hw_convergence,
                "steps_to_vspan_convergence": self.steps_to_vspan_convergence,
                "message": self.message}


@dataclass
class Trace:
    params: SimParams
    records: list[StepRecord] = field(default_factory=list)
    outcome: Outcome | None = None


class Simulation:
    """One seeded run; owns its policies and the current configuration."""

    def __init__(self, params: SimParams):
        self.params = p = params.resolved()
        self.tol = p.tolerances
        self.positions: list[Point] = list(p.initial)
        self.visibility = adversary.make_visibility(p.visibility, p.seed, p.script, self.tol)
        self.motion = adversary.make_motion(p.motion, p.seed)
        self.scheduler = adversary.make_scheduler(p.scheduler, p.seed, p.activation_p, p.fairness)
        self.decide = _decide_42 if p.algorithm == "fsync42" else decide_nk
        self.step_index = 0
        self.trace = Trace(p)
        self.first_hw: int | None = None
        self.first_vspan: int | None = None
        self.violation: str | None = None
        self._record(0, [], None)

    # -- one step -----------------------------------------------------------

    def step(self) -> StepRecord:
        p = self.params
        self.step_index += 1
        s = self.step_index
        n = p.n
        active = adversary.next_active_set(self.scheduler, s, n)
        full = p.trace_level == "full"
        moves: list[Move] = []
        before = self.positions
        after = list(before)
        clusters = Clustering(before, self.tol)
        for i in active:
            if p.sequential:
                clusters = Clustering(after, self.tol)
            view_from = after if p.sequential else before
            me = view_from[i]
            k = p.k if p.k is not None else adversary.draw_k(p.seed, s, i, n)
            cands = clusters.candidates(i)
            chosen = self.visibility.choose(i, me, cands, k, s)
            if p.online_checks:
                self._check_view(s, i, cands, chosen, k)
            obs = build_observation(me, chosen, self.tol)
            dest, case = self.decide(obs, p.chirality[i], self.tol)
            stop = self.motion.stop(me, dest, p.delta, s, i)
            if p.online_checks:
                self._check_motion(s, i, me, dest, stop)
            after[i] = stop
            if full:
                moves.append(Move(i, k, obs.others, dest, stop, case))
        self.positions = after
        return self._record(s, active, moves if full else None)

    def _record(self, s: int, active: list[int], moves) -> StepRecord:
        m = hull_metrics(self.positions, self.tol)
        rec = StepRecord(s, active, m, moves,
                         tuple(self.positions) if self.params.trace_level == "full" else None)
        if self.first_hw is None and m.hw < self.params.threshold:
            self.first_hw = s
        if self.first_vspan is None and m.vspan < self.params.threshold:
            self.first_vspan = s
        self.trace.records.append(rec)
        return rec

    def _check_view(self, s, i, cands, chosen, k) -> None:
        if self.violation:
            return
        if len(chosen) != min(k, len(cands)):
            self.violation = f"step {s}: robot {i} shown {len(chosen)} positions, expected {min(k, len(cands))}"
            return
        pool = set(cands)
        if len(set(chosen)) != len(chosen) or any(c not in pool for c in chosen):
            self.violation = f"step {s}: robot {i} shown a position outside its candidates"

    def _check_motion(self, s, i, start, dest, stop) -> None:
        if self.violation:
            return
        length = dist(start, dest)
        moved = dist(start, stop)
        if moved < min(self.params.delta, length) - MOTION_SLACK:
            self.violation = f"step {s}: robot {i} moved {moved!r} < min(delta, {length!r})"
        elif dist(start, stop) + dist(stop, dest) > length + 1e-9 * max(1.0, length):
            self.violation = f"step {s}: robot {i} stopped off the chord to its destination"

    # -- termination ----------------------------------------------------------

    def status(self) -> str | None:
        """Terminal status for the current configuration, or None to continue."""
        if self.violation:
            return VIOLATION
        m = self.trace.records[-1].metrics
        if m.span <= self.tol.eps_coincide:
            return GATHERED
        if m.hw < self.params.threshold and m.vspan < self.params.threshold:
            return CONVERGED
        return None

    def run(self) -> tuple[Outcome, Trace]:
        status = self.status()
        while status is None and self.step_index < self.params.max_steps:
            try:
                self.step()
            except DGatherError as exc:
                self.violation = f"step {self.step_index}: {exc}"
            status = self.status()
        if status is None:
            status = STEP_LIMIT
        pts = tuple(self.positions)
        gp = None
        if status in (GATHERED, CONVERGED):
            gp = Point(sum(q.x for q in pts) / len(pts), sum(q.y for q in pts) / len(pts))
        out = Outcome(status, self.step_index, pts, gp, self.first_hw, self.first_vspan,
                      self.violation or "")
        self.trace.outcome = out
        return out, self.trace


def _decide_42(obs, chirality, tol):
    return decide_42(obs, tol)


def run_simulation(params: SimParams) -> tuple[Outcome, Trace]:
    return Simulation(params).run()


def step_fsync(sim: Simulation) -> StepRecord:
    if sim.params.scheduler != "fsync":
        raise InvalidInput("step_fsync needs the fsync scheduler")
    return sim.step()


def step_async(sim: Simulation) -> StepRecord:
    if sim.params.algorithm != "asyncnk":
        raise InvalidInput("step_async runs the Go-Line algorithm only")
    return sim.step()


def evaluate_termination(sim: Simulation) -> str | None:
    return sim.status()
