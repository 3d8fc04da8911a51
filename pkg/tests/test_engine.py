import dataclasses
import math

import pytest

from dgather.engine import (
    CONVERGED,
    GATHERED,
    SimParams,
    Simulation,
    evaluate_termination,
    run_simulation,
    step_async,
    step_fsync,
)
from dgather.errors import InvalidInput
from dgather.geometry import HALF_SQRT3, SQRT3
from dgather.scenarios import centroid_triangle, centroid_triangle_script
from dgather.trace import (
    first_divergence,
    metrics_csv,
    read_trace,
    trace_lines,
    write_trace,
)


def test_two_robot_rendezvous_fsync():
    out, trace = run_simulation(SimParams(n=2, algorithm="fsync42", initial=((0, 0), (2, 0)), motion="full"))
    assert out.status == GATHERED and out.final_step == 1
    assert out.final_positions == ((1, 0), (1, 0))


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("scheduler", ["subset", "round-robin", "fsync"])
def test_two_robot_async_meets_at_the_apex(seed, scheduler):
    out, _ = run_simulation(SimParams(n=2, algorithm="asyncnk", initial=((0, 0), (2, 0)),
                                      motion="full", seed=seed, scheduler=scheduler))
    assert out.status == GATHERED
    assert math.dist(out.gathering_point, (1, SQRT3)) <= 1e-12


def test_colocated_start_is_gathered_at_step_zero():
    out, trace = run_simulation(SimParams(n=5, algorithm="asyncnk", initial=((3, 3),) * 5))
    assert out.status == GATHERED and out.final_step == 0
    assert len(trace.records) == 1


def test_square_gathers_in_one_round():
    # every 3 corners of a square form a right isosceles triangle whose base
    # is a diagonal, so each robot heads for the centre whatever it sees
    square = ((0, 0), (2, 0), (2, 2), (0, 2))
    for vis in ("random", "hide-farthest", "hide-nearest"):
        out, trace = run_simulation(SimParams(n=4, algorithm="fsync42", initial=square,
                                              motion="full", visibility=vis))
        assert out.final_step == 1 and out.status == GATHERED
        assert {m.case for m in trace.records[1].moves} == {"3.2.2"}
        assert all(m.dest == (1, 1) for m in trace.records[1].moves)


def test_scripted_centroid_triangle_gathers_in_three_rounds():
    params = SimParams(n=4, algorithm="fsync42", initial=centroid_triangle(), motion="full",
                       visibility="scripted", script=centroid_triangle_script())
    out, trace = run_simulation(params)
    assert out.status == GATHERED and out.final_step == 3
    assert math.dist(out.gathering_point, (0, 0.25)) <= 1e-12
    cases = [[m.case for m in r.moves] for r in trace.records[1:]]
    assert cases == [["3.2.1", "3.2.2", "3.2.2", "3.2.2w"],
                     ["3.2.2w", "3.2.2", "3.2.2", "3.2.2w"],
                     ["2", "2", "2", "2"]]


def test_gathered_configuration_is_a_fixpoint():
    sim = Simulation(SimParams(n=4, algorithm="fsync42", initial=((1, 1),) * 4))
    rec = step_fsync(sim)
    assert rec.positions == ((1, 1),) * 4


def test_single_mover_below_gains_height():
    params = SimParams(n=3, algorithm="asyncnk", initial=((0, 0), (3, 5), (4, 5)), scheduler="round-robin",
                       motion="min-delta", delta=0.1)
    sim = Simulation(params)
    rec = step_async(sim)
    assert rec.active == [0]
    start, stop = (0, 0), rec.positions[0]
    assert stop[1] - start[1] >= HALF_SQRT3 * min(0.1, math.dist(start, rec.moves[0].dest)) - 1e-12


def test_waiting_robot_does_not_move():
    params = SimParams(n=3, algorithm="asyncnk", initial=((0, 5), (3, 0), (4, 1)), scheduler="round-robin", k=1)
    rec = step_async(Simulation(params))
    assert rec.moves[0].case == "B1.1" and rec.positions[0] == (0, 5)


def test_termination_examples():
    sim = Simulation(SimParams(n=3, algorithm="asyncnk", initial=((1, SQRT3),) * 3))
    assert evaluate_termination(sim) == GATHERED
    disc = ((0, 0), (0.05, 0), (0, 0.05), (-0.03, -0.03))
    assert evaluate_termination(Simulation(SimParams(n=4, algorithm="asyncnk", initial=disc))) == CONVERGED
    wide = ((0, 0), (0.5, 0), (0.2, 0.01))
    assert evaluate_termination(Simulation(SimParams(n=3, algorithm="asyncnk", initial=wide))) is None


def test_step_limit_status():
    out, _ = run_simulation(SimParams(n=7, algorithm="asyncnk", seed=4, max_steps=3))
    assert out.status == "StepLimit" and out.final_step == 3


@pytest.mark.parametrize("bad", [
    dict(n=5, algorithm="fsync42"),
    dict(n=4, algorithm="fsync42", k=1),
    dict(n=4, algorithm="fsync42", scheduler="subset"),
    dict(n=6, algorithm="asyncnk", k=5),
    dict(n=1, algorithm="asyncnk"),
    dict(n=4, algorithm="asyncnk", delta=0),
    dict(n=4, algorithm="asyncnk", visibility="scripted"),
    dict(n=3, algorithm="asyncnk", initial=((0, 0), (1, 1))),
    dict(n=3, algorithm="warp"),
])
def test_invalid_params(bad):
    with pytest.raises(InvalidInput):
        SimParams(**bad).resolved()


def test_params_round_trip():
    p = SimParams(n=6, algorithm="asyncnk", seed=11).resolved()
    assert SimParams.from_dict(p.to_dict()) == p
    with pytest.raises(InvalidInput):
        SimParams.from_dict({"n": 3, "colour": "red"})


def test_trace_is_deterministic_and_seed_sensitive(tmp_path):
    p = SimParams(n=8, algorithm="asyncnk", seed=21, max_steps=400)
    a = list(trace_lines(run_simulation(p)[1]))
    b = list(trace_lines(run_simulation(p)[1]))
    assert a == b
    q = dataclasses.replace(p.resolved(), seed=22)
    c = list(trace_lines(run_simulation(q)[1]))
    # the initial positions are embedded, so the first difference is a step
    at = first_divergence(a[1:], c[1:])
    assert at is not None and at <= 1


def test_trace_file_round_trip(tmp_path):
    _, trace = run_simulation(SimParams(n=5, algorithm="asyncnk", seed=2))
    path = tmp_path / "t.jsonl"
    write_trace(trace, path)
    loaded = read_trace(path)
    assert loaded.lines == list(trace_lines(trace))
    assert loaded.params == trace.params
    assert loaded.outcome["status"] == trace.outcome.status
    csv_text = metrics_csv(trace)
    assert csv_text.splitlines()[0] == "step,span,hull_area,hw,vspan"
    assert len(csv_text.splitlines()) == len(trace.records) + 1


def test_sequential_flag_runs():
    out, _ = run_simulation(SimParams(n=6, algorithm="asyncnk", seed=3, sequential=True))
    assert out.ok


def test_online_check_downgrades_to_violation():
    class Cheat:
        def stop(self, start, dest, delta, step, robot):
            return start  # never moves: breaks the delta floor

    sim = Simulation(SimParams(n=4, algorithm="asyncnk", seed=1))
    sim.motion = Cheat()
    out, _ = sim.run()
    assert out.status == "InvariantViolation"
    assert "moved" in out.message
