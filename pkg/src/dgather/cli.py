"""Command-line front end: ``dgather run|sweep|check|replay``.

Exit codes: 0 success, 2 step limit reached, 3 invariant violation or
mismatch, 64 usage error. A ``--config`` JSON file may set any option using
either the flag's name (``algo``) or the parameter name (``algorithm``);
flags given on the command line win.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import adversary, checker, engine, sweep
from .engine import SimParams, run_simulation
from .errors import DGatherError, InvalidInput, ResourceLimit, ScriptError, TraceFormatError
from .geometry import Tolerances
from .model import Configuration
from .rng import Stream
from .trace import (atomic_write_text, dumps, first_divergence, metrics_csv, read_trace,
                    trace_lines)

EXIT_OK = 0
EXIT_STEP_LIMIT = 2
EXIT_VIOLATION = 3
EXIT_USAGE = 64

SUITES = ("collinear-midpoint", "longest-line", "trace-audit", "adversary-search", "gathering-point")

# flag dest -> SimParams field, where the two differ
FLAG_FIELDS = {"algo": "algorithm", "p": "activation_p"}
PARAM_FIELDS = {f.name for f in dataclasses.fields(SimParams)}


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _k_value(text: str):
    if text == "random":
        return "random"
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("K must be an integer or 'random'") from None


def _add_sim_flags(p: argparse.ArgumentParser, sweep_mode: bool = False) -> None:
    g = p.add_argument_group("simulation parameters")
    g.add_argument("--config", help="JSON file of options (flags override it)")
    g.add_argument("--algo", choices=engine.ALGORITHMS)
    if not sweep_mode:
        g.add_argument("--n", type=int, help="number of robots")
    g.add_argument("--k", type=_k_value, help="visibility bound, or 'random' per activation")
    g.add_argument("--delta", type=float, help="minimum progress per move (default 0.1)")
    g.add_argument("--scheduler", choices=adversary.SCHEDULERS)
    g.add_argument("--p", type=float, help="activation probability of the subset scheduler")
    g.add_argument("--fairness", type=int, help="longest idle stretch the subset scheduler allows")
    g.add_argument("--visibility", choices=[v for v in adversary.VISIBILITY if v != "exhaustive"])
    g.add_argument("--script", help="JSONL view script for scripted visibility")
    g.add_argument("--motion", choices=adversary.MOTIONS)
    g.add_argument("--seed", type=int)
    g.add_argument("--max-steps", type=int)
    g.add_argument("--threshold", type=float, help="convergence threshold (default 0.1)")
    if not sweep_mode:
        g.add_argument("--initial", help="JSON file with the initial positions")
        g.add_argument("--chirality", help="comma-separated +1/-1 per robot")
    g.add_argument("--extent", type=float, help="side of the square random starts are drawn from")
    g.add_argument("--sequential", action="store_const", const=True,
                   help="apply moves one robot at a time within a step")
    g.add_argument("--no-online-checks", dest="online_checks", action="store_const", const=False)
    g.add_argument("--trace-level", choices=engine.TRACE_LEVELS)


def build_parser() -> argparse.ArgumentParser:
    ap = Parser(prog="dgather", description="Gathering simulations under defected views.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=Parser)

    run = sub.add_parser("run", help="one simulation")
    _add_sim_flags(run)
    run.add_argument("--trace", help="trace output (default trace.jsonl)")
    run.add_argument("--metrics", help="metrics CSV output (default metrics.csv)")

    sw = sub.add_parser("sweep", help="swarm-size sweep of the Go-Line algorithm")
    _add_sim_flags(sw, sweep_mode=True)
    sw.add_argument("--n", dest="ns", help="swarm sizes start:stop:step (default 5:49:2)")
    sw.add_argument("--runs-h", type=int, help="runs averaged for width convergence (default 5)")
    sw.add_argument("--runs-v", type=int, help="runs averaged for vertical convergence (default 17)")
    sw.add_argument("--out", help="output prefix (default sweep)")
    sw.add_argument("--workers", type=int, help="parallel cells (default DG_WORKERS or CPU count)")

    ck = sub.add_parser("check", help="lemma check suites")
    ck.add_argument("suite", choices=SUITES)
    ck.add_argument("--config", help="JSON file of options or a run configuration")
    ck.add_argument("--samples", type=int)
    ck.add_argument("--seed", type=int)
    ck.add_argument("--trace", help="trace file for trace-audit")
    ck.add_argument("--initial", help="JSON file with initial positions")
    ck.add_argument("--depth", type=int, help="adversary-search depth (default 3)")
    ck.add_argument("--motions", help="adversary-search motion grid, e.g. full,min-delta")
    ck.add_argument("--delta", type=float)
    ck.add_argument("--script", help="JSONL view script forcing some search choices")
    ck.add_argument("--report", help="write the report as JSON lines here")

    rp = sub.add_parser("replay", help="re-run a trace and compare byte for byte")
    rp.add_argument("trace")
    rp.add_argument("--audit-only", action="store_true", help="audit the file without re-running")
    return ap


# --- option merging --------------------------------------------------------------


def _load_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _load_initial(value):
    data = _load_json(value) if isinstance(value, str) else value
    if isinstance(data, dict):
        data = data.get("initial")
    if not isinstance(data, list):
        raise UsageError("initial positions must be a JSON list of [x, y] pairs")
    return data


def _load_script(value):
    if isinstance(value, list):
        return value
    try:
        return adversary.load_script(value)
    except OSError as exc:
        raise UsageError(f"cannot read script {value}: {exc}") from exc


def merged_options(args) -> dict:
    opts: dict = {}
    if getattr(args, "config", None):
        cfg = _load_json(args.config)
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        opts.update(cfg)
    for key, val in vars(args).items():
        if key in ("config", "command") or val is None:
            continue
        opts[key] = val
    return opts


def params_from_options(opts: dict, extra_keys=()) -> SimParams:
    fields: dict = {}
    for key, val in opts.items():
        name = FLAG_FIELDS.get(key, key)
        if name in PARAM_FIELDS:
            fields[name] = val
        elif key not in extra_keys:
            raise UsageError(f"unknown option {key!r}")
    if fields.get("script") is not None:
        fields["script"] = _load_script(fields["script"])
        fields.setdefault("visibility", "scripted")
    if fields.get("initial") is not None:
        fields["initial"] = _load_initial(fields["initial"])
        fields.setdefault("n", len(fields["initial"]))
    if isinstance(fields.get("chirality"), str):
        try:
            fields["chirality"] = [int(c) for c in fields["chirality"].split(",")]
        except ValueError as exc:
            raise UsageError("chirality must be comma-separated integers") from exc
    if isinstance(fields.get("tolerances"), dict):
        fields["tolerances"] = Tolerances(**fields["tolerances"])
    if "n" not in fields:
        raise UsageError("--n is required")
    try:
        return SimParams.from_dict(fields).resolved()
    except TypeError as exc:
        raise UsageError(str(exc)) from exc


def _exit_for(outcome) -> int:
    if outcome.status == engine.VIOLATION:
        return EXIT_VIOLATION
    if outcome.status == engine.STEP_LIMIT:
        return EXIT_STEP_LIMIT
    return EXIT_OK


def _describe(outcome) -> str:
    parts = [f"status={outcome.status}", f"steps={outcome.final_step}"]
    if outcome.gathering_point is not None:
        gp = outcome.gathering_point
        parts.append(f"point=({gp[0]:.6g}, {gp[1]:.6g})")
    parts.append(f"hw_step={outcome.steps_to_hw_convergence}")
    parts.append(f"vspan_step={outcome.steps_to_vspan_convergence}")
    if outcome.message:
        parts.append(f"message={outcome.message!r}")
    return " ".join(parts)


# --- commands -------------------------------------------------------------------------


def cmd_run(args) -> int:
    opts = merged_options(args)
    trace_path = opts.pop("trace", None) or "trace.jsonl"
    metrics_path = opts.pop("metrics", None) or "metrics.csv"
    params = params_from_options(opts)
    outcome, trace = run_simulation(params)
    atomic_write_text(trace_path, "".join(line + "\n" for line in trace_lines(trace)))
    atomic_write_text(metrics_path, metrics_csv(trace))
    print(_describe(outcome))
    print(f"trace: {trace_path}  metrics: {metrics_path}")
    return _exit_for(outcome)


def cmd_sweep(args) -> int:
    opts = merged_options(args)
    ns = sweep.parse_range(str(opts.pop("ns", "5:49:2")))
    runs_h = int(opts.pop("runs_h", 5))
    runs_v = int(opts.pop("runs_v", 17))
    prefix = opts.pop("out", None) or "sweep"
    workers = opts.pop("workers", None)
    base_seed = int(opts.pop("seed", 0))
    opts.setdefault("algo", "asyncnk")
    opts.setdefault("max_steps", 50_000)
    opts["n"] = ns[0]
    template = params_from_options(opts)
    template = dataclasses.replace(template, seed=0, initial=None, chirality=None, fairness=opts.get("fairness"))

    def progress(row):
        print(f"N={row.n:3d} run={row.run:2d} {row.status} steps={row.final_step} "
              f"hw={row.steps_hw} vspan={row.steps_vspan}", file=sys.stderr)

    rows, summary = sweep.run_sweep(template, ns, runs_h, runs_v, base_seed,
                                    runs_path=f"{prefix}-runs.csv", workers=workers, progress=progress)
    atomic_write_text(f"{prefix}-summary.csv", sweep.summary_csv(summary))
    atomic_write_text(f"{prefix}-plot.csv", sweep.plot_csv(summary))
    for s in summary:
        print(f"N={s['n']:3d} avg_hw={s['avg_steps_hw']} avg_vspan={s['avg_steps_vspan']} "
              f"converged={s['all_converged']} hw_monotone={s['hw_monotone']}")
    print(f"wrote {prefix}-runs.csv, {prefix}-summary.csv, {prefix}-plot.csv")
    if any(r.status == engine.VIOLATION for r in rows):
        return EXIT_VIOLATION
    if any(r.status == engine.STEP_LIMIT for r in rows):
        return EXIT_STEP_LIMIT
    return EXIT_OK


def _gathering_point_suite(samples: int, seed: int) -> checker.Report:
    violations = []
    worst = 0.0
    for i in range(samples):
        s = Stream(seed, "gathering-point", i, 0)
        n = s.randint(3, 15)
        params = SimParams(n=n, algorithm="asyncnk", motion="full", seed=s.next_u64(),
                           trace_level="metrics", max_steps=50_000)
        out, trace = run_simulation(params)
        predicted = checker.predict_gathering_point(trace.params.initial)
        err = None if out.gathering_point is None else float(
            ((out.gathering_point[0] - predicted[0]) ** 2 + (out.gathering_point[1] - predicted[1]) ** 2) ** 0.5)
        if err is not None:
            worst = max(worst, err)
        if err is None or err > 2 * params.threshold:
            violations.append({"sample": i, "n": n, "status": out.status, "error": err})
    verdict = "fail" if violations else "pass"
    return checker.Report("gathering-point", verdict,
                          f"{samples} runs, largest distance to the predicted point {worst:.3g}",
                          {"samples": samples, "seed": seed, "max_error": worst}, violations)


def cmd_check(args) -> int:
    opts = merged_options(args)
    suite = opts.pop("suite")
    seed = int(opts.get("seed", 0))
    if suite == "collinear-midpoint":
        report = checker.collinear_midpoint_suite(int(opts.get("samples", 200)), seed)
    elif suite == "longest-line":
        report = checker.longest_line_suite(int(opts.get("samples", 10_000)), seed)
    elif suite == "trace-audit":
        if "trace" not in opts:
            raise UsageError("trace-audit needs --trace")
        report = checker.check_trace_invariants(read_trace(opts["trace"]))
    elif suite == "adversary-search":
        if "initial" not in opts:
            raise UsageError("adversary-search needs --initial or a config with 'initial'")
        initial = _load_initial(opts["initial"])
        script = _load_script(opts["script"]) if opts.get("script") is not None else None
        motions = opts.get("motions") or opts.get("motion") or "full,min-delta"
        if isinstance(motions, str):
            motions = motions.split(",")
        report = checker.adversary_search_42(
            Configuration.of(initial), int(opts.get("depth", 3)), tuple(motions),
            float(opts.get("delta", 0.1)), script)
    else:
        if "initial" in opts:
            pt = checker.predict_gathering_point(_load_initial(opts["initial"]))
            report = checker.Report("gathering-point", "pass", f"predicted point ({pt[0]!r}, {pt[1]!r})",
                                    {"point": list(pt)})
        else:
            report = _gathering_point_suite(int(opts.get("samples", 20)), seed)
    print(f"{report.suite}: {report.verdict.upper()} - {report.summary}")
    for ev in report.events[:5]:
        print(f"  info: {ev}")
    for v in report.violations[:5]:
        print(f"  violation: {dumps(v)[:300]}")
    if opts.get("report"):
        atomic_write_text(opts["report"], dumps(report.to_json()) + "\n")
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_replay(args) -> int:
    loaded = read_trace(args.trace)
    if args.audit_only:
        report = checker.check_trace_invariants(loaded)
        print(f"audit: {report.verdict.upper()} - {report.summary}")
        return EXIT_OK if report.ok else EXIT_VIOLATION
    _, trace = run_simulation(loaded.params)
    fresh = list(trace_lines(trace))
    # the header is the input; compare it by value, everything after it by bytes
    if json.loads(fresh[0]) != loaded.header:
        at = 0
    else:
        at = first_divergence(loaded.lines[1:], fresh[1:])
        at = None if at is None else at + 1
    if at is None:
        print(f"identical: {len(fresh)} lines")
        return EXIT_OK
    if at == 0:
        where = "header"
    elif at - 1 < len(loaded.steps) and at - 1 < len(trace.records):
        where = f"step {at - 1}"
    else:
        where = "outcome"
    print(f"mismatch at {where} (line {at + 1})")
    return EXIT_VIOLATION


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "check": cmd_check, "replay": cmd_replay}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, InvalidInput, ScriptError, TraceFormatError, ResourceLimit) as exc:
        print(f"dgather {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DGatherError as exc:
        print(f"dgather {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
