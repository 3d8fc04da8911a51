"""Swarm-size sweeps of the Go-Line algorithm.

Each (N, run) cell is an independent seeded simulation. Cells already present
in the per-run file (written by an earlier, interrupted sweep with the same
template) are reused, so a sweep can be resumed by re-running it.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .engine import SimParams, run_simulation
from .errors import InvalidInput
from .rng import draw_u64
from .trace import atomic_write_text

RUN_COLUMNS = ("n", "run", "seed", "status", "final_step", "steps_hw", "steps_vspan",
               "hw_monotone", "initial_hw", "initial_vspan")
SUMMARY_COLUMNS = ("n", "runs_h", "avg_steps_hw", "runs_v", "avg_steps_vspan",
                   "all_converged", "hw_monotone")
PLOT_COLUMNS = ("n", "series", "mean", "stdev", "runs")


def parse_range(text: str) -> list[int]:
    """``"5:49:2"`` -> 5, 7, ..., 49 (inclusive); a bare ``"9"`` is one value."""
    parts = text.split(":")
    try:
        nums = [int(p) for p in parts]
    except ValueError as exc:
        raise InvalidInput(f"bad range {text!r}") from exc
    if len(nums) == 1:
        return nums
    if len(nums) == 2:
        nums.append(1)
    if len(nums) != 3 or nums[2] <= 0 or nums[1] < nums[0]:
        raise InvalidInput(f"bad range {text!r}; expected start:stop[:step]")
    return list(range(nums[0], nums[1] + 1, nums[2]))


def run_seed(base: int, n: int, run: int) -> int:
    return draw_u64(base, "sweep", n, run, 0)


@dataclass
class RunRow:
    n: int
    run: int
    seed: int
    status: str
    final_step: int
    steps_hw: int | None
    steps_vspan: int | None
    hw_monotone: bool
    initial_hw: float
    initial_vspan: float

    def as_csv(self) -> list:
        return [self.n, self.run, self.seed, self.status, self.final_step,
                "" if self.steps_hw is None else self.steps_hw,
                "" if self.steps_vspan is None else self.steps_vspan,
                int(self.hw_monotone), repr(self.initial_hw), repr(self.initial_vspan)]

    @classmethod
    def from_csv(cls, row: dict) -> "RunRow":
        opt = lambda v: None if v == "" else int(v)  # noqa: E731
        return cls(int(row["n"]), int(row["run"]), int(row["seed"]), row["status"],
                   int(row["final_step"]), opt(row["steps_hw"]), opt(row["steps_vspan"]),
                   bool(int(row["hw_monotone"])), float(row["initial_hw"]), float(row["initial_vspan"]))


def cell_params(template: SimParams, n: int, seed: int) -> SimParams:
    return dataclasses.replace(template, n=n, seed=seed, initial=None, chirality=None)


def run_cell(template: SimParams, n: int, run: int, base_seed: int) -> RunRow:
    seed = run_seed(base_seed, n, run)
    out, trace = run_simulation(cell_params(template, n, seed))
    hws = [r.metrics.hw for r in trace.records]
    mono = all(b <= a + 1e-9 for a, b in zip(hws, hws[1:]))
    m0 = trace.records[0].metrics
    return RunRow(n, run, seed, out.status, out.final_step, out.steps_to_hw_convergence,
                  out.steps_to_vspan_convergence, mono, m0.hw, m0.vspan)


def _cell_job(args):
    return run_cell(*args)


def read_runs(path) -> list[RunRow]:
    with open(path, newline="") as fh:
        return [RunRow.from_csv(r) for r in csv.DictReader(fh)]


def runs_csv(rows: Sequence[RunRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RUN_COLUMNS)
    for r in sorted(rows, key=lambda r: (r.n, r.run)):
        w.writerow(r.as_csv())
    return buf.getvalue()


def _mean(xs):
    return statistics.fmean(xs) if xs else None


def summarize(rows: Sequence[RunRow], runs_h: int, runs_v: int) -> list[dict]:
    by_n: dict[int, list[RunRow]] = {}
    for r in rows:
        by_n.setdefault(r.n, []).append(r)
    out = []
    for n in sorted(by_n):
        cell = sorted(by_n[n], key=lambda r: r.run)
        hs = [r.steps_hw for r in cell[:runs_h] if r.steps_hw is not None]
        vs = [r.steps_vspan for r in cell[:runs_v] if r.steps_vspan is not None]
        out.append({"n": n, "runs_h": len(hs), "avg_steps_hw": _mean(hs),
                    "runs_v": len(vs), "avg_steps_vspan": _mean(vs),
                    "all_converged": all(r.status in ("Converged", "GatheredExact") for r in cell),
                    "hw_monotone": all(r.hw_monotone for r in cell),
                    "_hs": hs, "_vs": vs})
    return out


def summary_csv(summary: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for s in summary:
        w.writerow([s["n"], s["runs_h"], "" if s["avg_steps_hw"] is None else repr(s["avg_steps_hw"]),
                    s["runs_v"], "" if s["avg_steps_vspan"] is None else repr(s["avg_steps_vspan"]),
                    int(s["all_converged"]), int(s["hw_monotone"])])
    return buf.getvalue()


def plot_csv(summary: Sequence[dict]) -> str:
    """Long format, one row per (N, series), ready for any plotting tool."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PLOT_COLUMNS)
    for s in summary:
        for series, xs in (("hw", s["_hs"]), ("vspan", s["_vs"])):
            if xs:
                sd = statistics.stdev(xs) if len(xs) > 1 else 0.0
                w.writerow([s["n"], series, repr(statistics.fmean(xs)), repr(sd), len(xs)])
    return buf.getvalue()


def default_workers() -> int:
    env = os.environ.get("DG_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise InvalidInput(f"DG_WORKERS must be an integer, got {env!r}") from exc
    return os.cpu_count() or 1


def run_sweep(template: SimParams, ns: Sequence[int], runs_h: int = 5, runs_v: int = 17,
              base_seed: int = 0, runs_path=None, workers: int | None = None,
              progress: Callable[[RunRow], None] | None = None) -> tuple[list[RunRow], list[dict]]:
    """Run every missing (N, run) cell and return all rows plus per-N averages."""
    if runs_h < 1 or runs_v < 1:
        raise InvalidInput("run counts must be at least 1")
    if template.algorithm != "asyncnk":
        raise InvalidInput("sweeps run the asyncnk algorithm")
    for n in ns:
        dataclasses.replace(template, n=n, seed=0).resolved()
    per_n = max(runs_h, runs_v)
    fingerprint = json.dumps({"template": template.to_dict(), "base_seed": base_seed}, sort_keys=True)
    meta_path = Path(str(runs_path) + ".meta.json") if runs_path else None

    done: dict[tuple[int, int], RunRow] = {}
    if runs_path and Path(runs_path).exists() and meta_path.exists():
        meta = json.loads(meta_path.read_text())
        if json.dumps({"template": meta.get("template"), "base_seed": meta.get("base_seed")},
                      sort_keys=True) == fingerprint:
            for r in read_runs(runs_path):
                if r.seed == run_seed(base_seed, r.n, r.run):
                    done[(r.n, r.run)] = r
    if meta_path:
        atomic_write_text(meta_path, json.dumps({"template": template.to_dict(), "base_seed": base_seed,
                                                 "ns": list(ns), "runs_h": runs_h, "runs_v": runs_v},
                                                indent=1) + "\n")
    todo = [(n, j) for n in ns for j in range(per_n) if (n, j) not in done]
    workers = default_workers() if workers is None else max(1, workers)

    def record(row: RunRow) -> None:
        done[(row.n, row.run)] = row
        if runs_path:
            atomic_write_text(runs_path, runs_csv(list(done.values())))
        if progress:
            progress(row)

    if workers == 1 or len(todo) <= 1:
        for n, j in todo:
            record(run_cell(template, n, j, base_seed))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for row in pool.map(_cell_job, [(template, n, j, base_seed) for n, j in todo]):
                record(row)
    rows = [done[(n, j)] for n in ns for j in range(per_n)]
    return rows, summarize(rows, runs_h, runs_v)
