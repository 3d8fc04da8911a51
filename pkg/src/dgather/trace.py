"""Trace and metrics files.

A trace is line-delimited JSON: one header carrying the resolved parameters,
one record per step (step 0 is the initial configuration), then the outcome.
Floats go through ``repr``, which round-trips every double exactly.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .engine import SimParams, Trace
from .errors import InvalidInput, TraceFormatError

FORMAT = "dgather-trace/1"
METRIC_COLUMNS = ("step", "span", "hull_area", "hw", "vspan")


def dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def trace_lines(trace: Trace) -> Iterator[str]:
    yield dumps({"type": "header", "format": FORMAT, "params": trace.params.to_dict()})
    for rec in trace.records:
        yield dumps(rec.to_json())
    if trace.outcome is not None:
        yield dumps(trace.outcome.to_json())


def atomic_write_text(path, text: str) -> None:
    """Write to a sibling temp file, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_trace(trace: Trace, path) -> None:
    atomic_write_text(path, "".join(line + "\n" for line in trace_lines(trace)))


def metrics_csv(trace: Trace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(METRIC_COLUMNS)
    for rec in trace.records:
        m = rec.metrics
        w.writerow([rec.step, repr(m.span), repr(m.area), repr(m.hw), repr(m.vspan)])
    return buf.getvalue()


def write_metrics(trace: Trace, path) -> None:
    atomic_write_text(path, metrics_csv(trace))


@dataclass
class LoadedTrace:
    """A trace file as plain dicts, plus its parsed parameters."""

    params: SimParams
    header: dict
    steps: list[dict] = field(default_factory=list)
    outcome: dict | None = None
    lines: list[str] = field(default_factory=list)


def parse_trace_lines(lines: Iterable[str], source: str = "<trace>") -> LoadedTrace:
    raw = [ln.rstrip("\n") for ln in lines if ln.strip()]
    if not raw:
        raise TraceFormatError(f"{source}: empty trace")
    try:
        records = [json.loads(ln) for ln in raw]
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"{source}: {exc}") from exc
    head = records[0]
    if not isinstance(head, dict) or head.get("type") != "header" or "params" not in head:
        raise TraceFormatError(f"{source}: first line is not a trace header")
    try:
        params = SimParams.from_dict(head["params"])
    except (InvalidInput, TypeError, ValueError) as exc:
        raise TraceFormatError(f"{source}: bad parameters in header: {exc}") from exc
    out = LoadedTrace(params, head, lines=raw)
    expected = 0
    for i, rec in enumerate(records[1:], 2):
        if not isinstance(rec, dict):
            raise TraceFormatError(f"{source}:{i}: record is not an object")
        kind = rec.get("type")
        if kind == "step":
            if out.outcome is not None:
                raise TraceFormatError(f"{source}:{i}: step after outcome")
            if rec.get("step") != expected or "metrics" not in rec:
                raise TraceFormatError(f"{source}:{i}: expected step {expected}")
            expected += 1
            out.steps.append(rec)
        elif kind == "outcome":
            if out.outcome is not None:
                raise TraceFormatError(f"{source}:{i}: duplicate outcome")
            out.outcome = rec
        else:
            raise TraceFormatError(f"{source}:{i}: unknown record type {kind!r}")
    if not out.steps:
        raise TraceFormatError(f"{source}: no step records")
    return out


def read_trace(path) -> LoadedTrace:
    try:
        with open(path) as fh:
            return parse_trace_lines(fh, str(path))
    except OSError as exc:
        raise TraceFormatError(f"cannot read {path}: {exc}") from exc


def loaded_from_trace(trace: Trace) -> LoadedTrace:
    """In-memory trace in the same shape :func:`read_trace` returns."""
    return parse_trace_lines(trace_lines(trace))


def first_divergence(a: list[str], b: list[str]) -> int | None:
    """Index of the first differing line, or None when identical."""
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return i
    if len(a) != len(b):
        return min(len(a), len(b))
    return None
