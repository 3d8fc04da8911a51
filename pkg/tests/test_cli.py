import json

import pytest

from dgather.cli import main
from dgather.scenarios import centroid_triangle_config


@pytest.fixture(autouse=True)
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_run_fsync42(in_tmp, capsys):
    assert main(["run", "--algo", "fsync42", "--n", "4", "--seed", "7", "--delta", "0.1", "--motion", "full"]) == 0
    assert (in_tmp / "trace.jsonl").exists() and (in_tmp / "metrics.csv").exists()
    assert "GatheredExact" in capsys.readouterr().out


def test_run_asyncnk_records_crossings(capsys):
    assert main(["run", "--algo", "asyncnk", "--n", "9", "--k", "random", "--seed", "1",
                 "--threshold", "0.1"]) == 0
    out = capsys.readouterr().out
    assert "status=Converged" in out and "hw_step=" in out and "vspan_step=" in out


def test_usage_errors():
    assert main(["run", "--algo", "fsync42", "--n", "5"]) == 64
    with pytest.raises(SystemExit) as exc:
        main(["check", "no-such-suite"])
    assert exc.value.code == 64
    with pytest.raises(SystemExit) as exc:
        main(["run", "--n", "four"])
    assert exc.value.code == 64
    assert main(["run", "--config", "missing.json", "--n", "4"]) == 64


def test_step_limit_exit_code():
    assert main(["run", "--n", "9", "--seed", "2", "--max-steps", "5"]) == 2


def test_config_file_and_flag_override(in_tmp):
    (in_tmp / "cfg.json").write_text(json.dumps({"algorithm": "asyncnk", "n": 6, "seed": 3, "trace": "x.jsonl"}))
    assert main(["run", "--config", "cfg.json", "--seed", "4"]) == 0
    header = json.loads((in_tmp / "x.jsonl").read_text().splitlines()[0])
    assert header["params"]["seed"] == 4 and header["params"]["n"] == 6


def test_scripted_scenario_via_config(in_tmp, capsys):
    (in_tmp / "fig.json").write_text(json.dumps(centroid_triangle_config()))
    assert main(["run", "--config", "fig.json"]) == 0
    assert "steps=3" in capsys.readouterr().out
    assert main(["check", "adversary-search", "--config", "fig.json", "--depth", "4"]) == 0
    assert "gathered in 3 rounds" in capsys.readouterr().out


def test_check_suites(in_tmp):
    assert main(["check", "collinear-midpoint", "--samples", "20", "--seed", "3"]) == 0
    assert main(["check", "longest-line", "--samples", "200", "--seed", "3", "--report", "r.jsonl"]) == 0
    rep = json.loads((in_tmp / "r.jsonl").read_text())
    assert rep["verdict"] == "pass"
    assert main(["check", "gathering-point", "--samples", "2", "--seed", "1"]) == 0


def test_replay_and_audit(in_tmp, capsys):
    assert main(["run", "--n", "7", "--seed", "5", "--trace", "t.jsonl"]) == 0
    assert main(["replay", "t.jsonl"]) == 0
    assert main(["replay", "t.jsonl", "--audit-only"]) == 0
    assert main(["check", "trace-audit", "--trace", "t.jsonl"]) == 0
    lines = (in_tmp / "t.jsonl").read_text().splitlines()
    head = json.loads(lines[0])
    head["params"]["seed"] = 6
    (in_tmp / "e.jsonl").write_text("\n".join([json.dumps(head), *lines[1:]]) + "\n")
    capsys.readouterr()
    assert main(["replay", "e.jsonl"]) == 3
    assert "mismatch at step 1" in capsys.readouterr().out


def test_corrupted_trace_audit_exits_3(in_tmp):
    assert main(["run", "--n", "7", "--seed", "5", "--trace", "t.jsonl"]) == 0
    recs = [json.loads(x) for x in (in_tmp / "t.jsonl").read_text().splitlines()]
    step = next(r for r in recs if r.get("type") == "step" and r["step"] >= 2 and r["moves"])
    mv = step["moves"][0]
    mv["stop"] = [mv["stop"][0] + 40.0, mv["stop"][1] - 40.0]
    step["positions"][mv["robot"]] = mv["stop"]
    (in_tmp / "bad.jsonl").write_text("\n".join(json.dumps(r) for r in recs) + "\n")
    assert main(["check", "trace-audit", "--trace", "bad.jsonl"]) == 3
    assert main(["replay", "bad.jsonl", "--audit-only"]) == 3


def test_sweep_single_cell_and_resume(in_tmp, capsys):
    args = ["sweep", "--n", "5:5:2", "--runs-h", "1", "--runs-v", "2", "--seed", "9", "--workers", "1"]
    assert main(args) == 0
    runs = (in_tmp / "sweep-runs.csv").read_text()
    summary = (in_tmp / "sweep-summary.csv").read_text().splitlines()
    assert len(summary) == 2 and summary[1].startswith("5,1,")
    assert (in_tmp / "sweep-plot.csv").read_text().startswith("n,series,mean,stdev,runs")
    # a second invocation reuses every finished cell
    capsys.readouterr()
    assert main(args) == 0
    assert "run=" not in capsys.readouterr().err
    assert (in_tmp / "sweep-runs.csv").read_text() == runs
