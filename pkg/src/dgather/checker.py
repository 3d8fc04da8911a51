"""Executable checks of the gathering lemmas.

Three kinds of tool live here: exhaustive oracles over the (4,2) model's view
choices, auditors that replay a trace's per-step claims, and the predicted
gathering point of the Go-Line algorithm.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .adversary import Exhaustive, Scripted
from .engine import Trace
from .errors import InvalidInput, ResourceLimit, TraceFormatError
from .fsync42 import decide_42
from .geometry import (
    DEFAULT_TOL,
    HALF_SQRT3,
    Point,
    Segment,
    Tolerances,
    TriangleKind,
    as_point,
    classify_triangle,
    collinear,
    convex_hull,
    dist,
    extremal_frame,
)
from .model import Clustering, Configuration, build_observation
from .rng import Stream
from .trace import LoadedTrace

SLACK = 1e-9
MOTION_SLACK = 1e-12
MAX_SEARCH_DEPTH = 6


@dataclass
class Report:
    """Outcome of one check; ``verdict`` is ``"pass"``, ``"fail"`` or ``"skip"``."""

    suite: str
    verdict: str
    summary: str
    data: dict[str, Any] = field(default_factory=dict)
    violations: list[dict] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.verdict != "fail"

    def to_json(self) -> dict:
        return {"suite": self.suite, "verdict": self.verdict, "summary": self.summary,
                "data": self.data, "violations": self.violations, "events": self.events}


def _pt(p) -> list[float]:
    return [p[0], p[1]]


# --- (4,2) enumeration ---------------------------------------------------------


def view_options_42(config: Configuration, tol: Tolerances = DEFAULT_TOL) -> list[list[tuple[Point, ...]]]:
    """Per robot, every legal view: 2 of its distinct candidates, or all of them."""
    if config.n != 4:
        raise InvalidInput("the (4,2) model has exactly four robots")
    clusters = Clustering(config.positions, tol)
    return [Exhaustive.options(clusters.candidates(i), 2) for i in range(4)]


def enumerate_view_assignments_42(config: Configuration,
                                  tol: Tolerances = DEFAULT_TOL) -> list[tuple[tuple[Point, ...], ...]]:
    return list(itertools.product(*view_options_42(config, tol)))


def destinations_42(config: Configuration, assignment, tol: Tolerances = DEFAULT_TOL) -> list[Point]:
    return [decide_42(build_observation(config[i], view, tol), tol)[0]
            for i, view in enumerate(assignment)]


def _has_coincident_pair(points: Sequence[Point], eps: float) -> bool:
    return any(dist(a, b) <= eps for a, b in itertools.combinations(points, 2))


def check_collinear_midpoint_lemma(config: Configuration, tol: Tolerances = DEFAULT_TOL) -> Report:
    """Every joint view assignment of a collinear quadruple yields two equal destinations."""
    if config.n != 4:
        raise InvalidInput("the (4,2) model has exactly four robots")
    reps = Clustering(config.positions, tol).reps
    if len(reps) >= 3:
        a, b = reps[0], reps[-1]
        if not all(collinear(a, b, c, tol) for c in reps[1:-1]):
            raise InvalidInput("configuration is not collinear")
    assignments = enumerate_view_assignments_42(config, tol)
    violations = []
    for idx, asg in enumerate(assignments):
        dests = destinations_42(config, asg, tol)
        if not _has_coincident_pair(dests, tol.eps_coincide):
            violations.append({"assignment": idx, "views": [[_pt(p) for p in v] for v in asg],
                               "destinations": [_pt(d) for d in dests]})
    verdict = "fail" if violations else "pass"
    return Report("collinear-midpoint", verdict,
                  f"{len(assignments) - len(violations)}/{len(assignments)} assignments with a shared destination",
                  {"assignments": len(assignments), "distinct": len(reps)}, violations)


def random_collinear_42(seed: int, index: int) -> Configuration:
    """Four points on a random line; one sample in ten repeats a position."""
    s = Stream(seed, "collinear", index, 0)
    ox, oy = s.uniform(-10, 10), s.uniform(-10, 10)
    angle = s.uniform(0.0, math.pi)
    ux, uy = math.cos(angle), math.sin(angle)
    ts = [s.uniform(-5, 5) for _ in range(4)]
    if s.randbelow(10) == 0:
        ts[3] = ts[s.randbelow(3)]
    return Configuration(tuple(Point(ox + t * ux, oy + t * uy) for t in ts))


def collinear_midpoint_suite(samples: int, seed: int, tol: Tolerances = DEFAULT_TOL) -> Report:
    total = 0
    violations = []
    for i in range(samples):
        rep = check_collinear_midpoint_lemma(random_collinear_42(seed, i), tol)
        total += rep.data["assignments"]
        violations.extend({"sample": i, **v} for v in rep.violations)
    verdict = "fail" if violations else "pass"
    return Report("collinear-midpoint", verdict,
                  f"{samples} collinear configurations, {total} assignments, {len(violations)} without a shared destination",
                  {"samples": samples, "assignments": total, "seed": seed}, violations[:20])


# --- longest sides ---------------------------------------------------------------


def _convex_position(points: Sequence[Point], tol: Tolerances) -> bool:
    return len(convex_hull(points, tol)) == len(points)


def check_longest_line_bound(points: Sequence, tol: Tolerances = DEFAULT_TOL) -> Report:
    """Distinct longest sides over the four sub-triangles of a scalene convex quadrilateral."""
    pts = [as_point(p) for p in points]
    if len(pts) != 4:
        raise InvalidInput("need exactly four points")
    if any(dist(a, b) <= tol.eps_coincide for a, b in itertools.combinations(pts, 2)):
        return Report("longest-line", "skip", "coincident points")
    if not _convex_position(pts, tol):
        return Report("longest-line", "skip", "not in convex position")
    longest: list[Segment] = []
    for tri in itertools.combinations(pts, 3):
        if any(collinear(a, b, c, tol) for a, b, c in [tri]):
            return Report("longest-line", "skip", "degenerate sub-triangle")
        cls = classify_triangle(*tri, tol=tol)
        if cls.kind is not TriangleKind.SCALENE:
            return Report("longest-line", "skip", "non-scalene sub-triangle")
        longest.append(cls.longest)
    distinct = set(longest)
    a, b = max(itertools.combinations(pts, 2), key=lambda ab: dist(*ab))
    diameter = Segment(a, b).canonical()
    diameter_count = sum(1 for s in longest if s == diameter)
    violations = []
    if len(distinct) > 3:
        violations.append({"distinct_longest": len(distinct)})
    if diameter_count != 2:
        violations.append({"diameter_as_longest": diameter_count})
    verdict = "fail" if violations else "pass"
    return Report("longest-line", verdict,
                  f"{len(distinct)} distinct longest sides, diameter longest in {diameter_count} triangles",
                  {"distinct_longest": len(distinct), "diameter_count": diameter_count}, violations)


def longest_line_suite(samples: int, seed: int, tol: Tolerances = DEFAULT_TOL,
                       max_draws: int | None = None) -> Report:
    """Draw quadruples in the unit square until ``samples`` pass the filter."""
    limit = max_draws if max_draws is not None else 20 * samples + 100
    accepted = draws = 0
    worst = 0
    violations = []
    while accepted < samples and draws < limit:
        s = Stream(seed, "longest-line", draws, 0)
        draws += 1
        rep = check_longest_line_bound([(s.random(), s.random()) for _ in range(4)], tol)
        if rep.verdict == "skip":
            continue
        accepted += 1
        worst = max(worst, rep.data["distinct_longest"])
        violations.extend({"draw": draws - 1, **v} for v in rep.violations)
    if accepted < samples:
        return Report("longest-line", "fail", f"only {accepted} of {samples} samples passed the filter",
                      {"accepted": accepted, "draws": draws})
    verdict = "fail" if violations else "pass"
    return Report("longest-line", verdict,
                  f"{accepted} filtered quadrilaterals ({draws} drawn), at most {worst} distinct longest sides",
                  {"accepted": accepted, "draws": draws, "max_distinct": worst, "seed": seed},
                  violations[:20])


# --- trace audit -------------------------------------------------------------------


def _steps_of(trace) -> tuple[Any, list[dict]]:
    if isinstance(trace, Trace):
        return trace.params, [r.to_json() for r in trace.records]
    if isinstance(trace, LoadedTrace):
        return trace.params, trace.steps
    raise TraceFormatError("expected an engine Trace or a loaded trace file")


def check_trace_invariants(trace, params=None) -> Report:
    """Audit the monotone metrics and per-move contracts recorded in a trace."""
    tparams, steps = _steps_of(trace)
    params = (params or tparams).resolved()
    delta = params.delta
    try:
        initial = [as_point(p) for p in steps[0]["positions"]] if "positions" in steps[0] else list(params.initial)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise TraceFormatError(f"malformed initial record: {exc}") from exc
    frame = extremal_frame(initial)
    async_run = params.algorithm == "asyncnk"
    violations: list[dict] = []
    events: list[dict] = []
    positions = initial
    prev = steps[0]["metrics"]
    moves_checked = 0

    def flag(step, kind, **info):
        violations.append({"step": step, "kind": kind, **info})

    for rec in steps[1:]:
        try:
            s = rec["step"]
            m = rec["metrics"]
            if async_run:
                if m["hw"] > prev["hw"] + SLACK:
                    flag(s, "hw-increase", before=prev["hw"], after=m["hw"])
            elif m["span"] > prev["span"] + SLACK:
                flag(s, "span-increase", before=prev["span"], after=m["span"])
            prev = m
            moves = rec.get("moves")
            if moves is None:
                continue
            nxt = list(positions)
            waits = 0
            for mv in moves:
                i = mv["robot"]
                start = positions[i]
                stop, dest = as_point(mv["stop"]), as_point(mv["dest"])
                nxt[i] = stop
                moved = dist(start, stop)
                moves_checked += 1
                if moved == 0.0:
                    waits += 1
                want = min(delta, dist(start, dest))
                if moved < want - MOTION_SLACK:
                    flag(s, "short-move", robot=i, moved=moved, required=want)
                if dist(start, stop) + dist(stop, dest) > dist(start, dest) + SLACK * max(1.0, dist(start, dest)):
                    flag(s, "off-chord", robot=i)
                if async_run:
                    if stop.y - start.y < (HALF_SQRT3 - SLACK) * moved:
                        flag(s, "vertical-gain", robot=i, gain=stop.y - start.y, moved=moved)
                    if frame.excess(stop) > SLACK:
                        flag(s, "outside-frame", robot=i, excess=frame.excess(stop))
            if "positions" in rec:
                nxt = [as_point(p) for p in rec["positions"]]
                for mv in moves:
                    if dist(nxt[mv["robot"]], as_point(mv["stop"])) > 0.0:
                        flag(s, "position-mismatch", robot=mv["robot"])
                active = {mv["robot"] for mv in moves}
                for i, (a, b) in enumerate(zip(positions, nxt)):
                    if i not in active and a != b:
                        flag(s, "idle-robot-moved", robot=i)
            if moves and waits == len(moves):
                events.append({"step": s, "kind": "global-wait", "active": len(moves)})
            positions = nxt
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise TraceFormatError(f"malformed step record: {exc}") from exc
    verdict = "fail" if violations else "pass"
    first = f", first at step {violations[0]['step']} ({violations[0]['kind']})" if violations else ""
    return Report("trace-audit", verdict,
                  f"{len(steps) - 1} steps, {moves_checked} moves audited, {len(violations)} violations{first}",
                  {"steps": len(steps) - 1, "moves": moves_checked,
                   "first_violation": violations[0]["step"] if violations else None},
                  violations[:50], events[:50])


# --- gathering point ----------------------------------------------------------------


def predict_gathering_point(initial) -> Point:
    """Apex of the two extremal 60 degree lines around the initial positions."""
    pts = initial.positions if isinstance(initial, Configuration) else [as_point(p) for p in initial]
    return extremal_frame(pts).apex


# --- adversary search ----------------------------------------------------------------


def _span(points: Sequence[Point]) -> float:
    return max((dist(a, b) for a, b in itertools.combinations(points, 2)), default=0.0)


def _stop_options(start: Point, dest: Point, delta: float, motions: Sequence[str]) -> list[Point]:
    length = dist(start, dest)
    if length <= delta:
        return [dest]
    out = []
    for mname in motions:
        if mname == "full":
            out.append(dest)
        elif mname == "min-delta":
            f = delta / length
            out.append(Point(start.x + (dest.x - start.x) * f, start.y + (dest.y - start.y) * f))
        else:
            raise InvalidInput(f"search motion grid accepts full and min-delta, not {mname!r}")
    return list(dict.fromkeys(out))


@dataclass
class _Node:
    worst: float           # rounds until gathered on the slowest branch (inf if some branch never does)
    span: float            # largest final span over all branches
    path: tuple            # configurations along the max-span branch


def adversary_search_42(initial, depth: int, motions: Sequence[str] = ("full", "min-delta"),
                        delta: float = 0.1, script=None, tol: Tolerances = DEFAULT_TOL,
                        max_depth: int = MAX_SEARCH_DEPTH) -> Report:
    """Exhaustive FSYNC game tree over view assignments and motion choices.

    With ``script`` given, views listed for a (round, robot) pair are forced
    and only the remaining choices branch.
    """
    config = initial if isinstance(initial, Configuration) else Configuration(tuple(initial))
    if config.n != 4:
        raise InvalidInput("adversary search runs the (4,2) model: N must be 4")
    if depth < 0:
        raise InvalidInput("depth must be non-negative")
    if depth > max_depth:
        raise ResourceLimit(f"depth {depth} exceeds the search bound {max_depth} "
                            f"(up to 81*16 children per round)")
    if not delta > 0:
        raise InvalidInput("delta must be positive")
    scripted = Scripted(script, tol) if script is not None else None
    eps = tol.eps_coincide
    memo: dict = {}
    violations: list[dict] = []
    counts = {"nodes": 0, "edges": 0}

    def children(pos: tuple[Point, ...], rnd: int) -> set[tuple[Point, ...]]:
        cfg = Configuration(pos)
        clusters = Clustering(pos, tol)
        options = []
        for i in range(4):
            cands = sorted(clusters.candidates(i))
            if scripted is not None and (rnd, i) in scripted.table and len(cands) > 2:
                options.append([tuple(scripted.pick(i, pos[i], cands, 2, rnd))])
            else:
                options.append(Exhaustive.options(cands, 2))
        out: set[tuple[Point, ...]] = set()
        for asg in itertools.product(*options):
            dests = destinations_42(cfg, asg, tol)
            stops = [_stop_options(pos[i], dests[i], delta, motions) for i in range(4)]
            out.update(itertools.product(*stops))
        return out

    def visit(pos: tuple[Point, ...], rnd: int, left: int) -> _Node:
        key = (pos if scripted is not None else tuple(sorted(pos)), rnd if scripted is not None else 0, left)
        if key in memo:
            return memo[key]
        counts["nodes"] += 1
        span = _span(pos)
        if span <= eps:
            node = _Node(0, span, (pos,))
        elif left == 0:
            node = _Node(math.inf, span, (pos,))
        else:
            worst, best_span, best_path = 0.0, -1.0, ()
            for child in sorted(children(pos, rnd)):
                counts["edges"] += 1
                cspan = _span(child)
                if cspan > span + SLACK and len(violations) < 20:
                    violations.append({"kind": "span-increase", "round": rnd,
                                       "from": [_pt(p) for p in pos], "to": [_pt(p) for p in child],
                                       "before": span, "after": cspan})
                sub = visit(child, rnd + 1, left - 1)
                worst = max(worst, 1 + sub.worst)
                if sub.span > best_span:
                    best_span, best_path = sub.span, (pos, *sub.path)
            node = _Node(worst, best_span, best_path)
        memo[key] = node
        return node

    root = visit(config.positions, 1, depth)
    close = all(dist(a, b) <= delta for a, b in itertools.combinations(config.positions, 2))
    gathered_all = math.isfinite(root.worst)
    data = {"depth": depth, "motions": list(motions), "delta": delta,
            "gathered_all": gathered_all,
            "worst_rounds": root.worst if gathered_all else None,
            "max_final_span": root.span,
            "max_span_path": [[_pt(p) for p in cfg] for cfg in root.path],
            "close_root": close, **counts}
    if close and not gathered_all:
        violations.append({"kind": "not-gathered", "depth": depth,
                           "path": data["max_span_path"]})
    verdict = "fail" if violations else "pass"
    if gathered_all:
        summary = f"every branch gathered; gathered in {int(root.worst)} rounds (worst case)"
    else:
        summary = f"some branch not gathered within {depth} rounds (max final span {root.span:.3g})"
    return Report("adversary-search", verdict, summary, data, violations)
