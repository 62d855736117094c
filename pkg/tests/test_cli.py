import io
import json
from pathlib import Path

import pytest

from coexsim.cli import main
from coexsim.golden import load_golden_text

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- run -------------------------------------------------------------------------

def test_run_builtin_prints_summary(capsys):
    code, out, err = run_cli(capsys, "run", "--builtin", "fig2")
    assert code == 0
    summary = json.loads(out)
    assert summary["scenario"] == "fig2"
    assert summary["seed"] == 2
    assert set(summary) == {"scenario", "seed", "horizon_ns", "trace_sha256",
                            "metrics", "compliance"}
    assert summary["compliance"]["ok"] is True


def test_run_writes_trace_and_summary_files(tmp_path, capsys):
    trace_path = tmp_path / "out.trace"
    summary_path = tmp_path / "out.json"
    code, out, _ = run_cli(capsys, "run", "--builtin", "fig2",
                           "--trace", str(trace_path),
                           "--summary", str(summary_path))
    assert code == 0 and out == ""
    assert trace_path.read_text() == load_golden_text("fig2")
    assert json.loads(summary_path.read_text())["scenario"] == "fig2"


def test_run_scenario_file(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "run", "--scenario",
                           str(SCENARIO_DIR / "fig5c.json"),
                           "--check-compliance")
    assert code == 0
    assert json.loads(out)["scenario"] == "fig5c"


def test_run_missing_scenario_file_is_bad_input(capsys):
    code, _, err = run_cli(capsys, "run", "--scenario", "/nope/missing.json")
    assert code == 2
    assert "error:" in err


def test_run_invalid_scenario_file_is_bad_input(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"simulation": {"horizon_ns": 0}}')
    code, _, err = run_cli(capsys, "run", "--scenario", str(p))
    assert code == 2
    assert "horizon_ns" in err


def test_run_requires_exactly_one_source(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run", "--builtin", "fig2", "--scenario", "x.json"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["run"])
    assert exc.value.code == 2


def test_run_rejects_unknown_builtin_name(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run", "--builtin", "fig999"])
    assert exc.value.code == 2


def test_run_overrides_duration(capsys):
    code, out, _ = run_cli(capsys, "run", "--builtin", "duty-solo",
                           "--duration-ms", "25")
    assert code == 0
    summary = json.loads(out)
    assert summary["horizon_ns"] == 25_000_000
    # two whole occupancies plus 4.5 ms of a third: 23.5 ms busy out of 25
    assert summary["metrics"]["busy_fraction"] == pytest.approx(0.94)


def test_run_replications_aggregate(capsys):
    code, out, _ = run_cli(capsys, "run", "--builtin", "fig5c",
                           "--seed", "10", "--replications", "3")
    assert code == 0
    body = json.loads(out)
    assert [s["seed"] for s in body["replications"]] == [10, 11, 12]
    agg = body["aggregate"]
    assert agg["runs"] == 3 and agg["compliant_runs"] == 3
    assert 0.0 < agg["mean_busy_fraction"] <= 1.0


def test_run_trace_with_replications_is_bad_input(capsys):
    code, _, err = run_cli(capsys, "run", "--builtin", "fig2",
                           "--replications", "2", "--trace", "-")
    assert code == 2
    code, _, err = run_cli(capsys, "run", "--builtin", "fig2",
                           "--replications", "0")
    assert code == 2


# -- replay -----------------------------------------------------------------------

def test_replay_all_golden(capsys):
    code, out, _ = run_cli(capsys, "replay")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 4
    assert all(": ok (" in line for line in lines)
    assert [l.split()[1].rstrip(":") for l in lines] == [
        "fig2", "fig5b", "fig5c", "fig6"]


def test_replay_single(capsys):
    code, out, _ = run_cli(capsys, "replay", "fig2")
    assert code == 0
    assert out.startswith("replay fig2: ok")


def test_replay_unknown_name(capsys):
    code, _, err = run_cli(capsys, "replay", "fig999")
    assert code == 2


# -- audit -------------------------------------------------------------------------

def test_audit_clean_trace(tmp_path, capsys):
    p = tmp_path / "good.trace"
    p.write_text(load_golden_text("fig5b"))
    code, out, _ = run_cli(capsys, "audit", str(p))
    assert code == 0
    assert "audit: ok" in out


def test_audit_tampered_trace_fails(tmp_path, capsys):
    text = load_golden_text("fig5b")
    # stretch the first occupancy past the cap
    tampered = text.replace("burst_end=10000000", "burst_end=10100000", 1)
    assert tampered != text
    p = tmp_path / "bad.trace"
    p.write_text(tampered)
    code, out, _ = run_cli(capsys, "audit", str(p))
    assert code == 1
    assert "audit: FAILED" in out
    assert "violation:" in out


def test_audit_json_output(tmp_path, capsys):
    p = tmp_path / "good.trace"
    p.write_text(load_golden_text("fig5c"))
    code, out, _ = run_cli(capsys, "audit", str(p), "--json")
    assert code == 0
    report = json.loads(out)
    assert report["ok"] is True
    assert report["cca_count"] >= 1


def test_audit_stdin(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(load_golden_text("fig6")))
    code, out, _ = run_cli(capsys, "audit", "-")
    assert code == 0
    assert "audit: ok" in out


def test_audit_missing_file(capsys):
    code, _, err = run_cli(capsys, "audit", "/nope/missing.trace")
    assert code == 2


def test_audit_unparseable_trace(tmp_path, capsys):
    p = tmp_path / "garbage.trace"
    p.write_text("this is not a trace\n")
    code, _, err = run_cli(capsys, "audit", str(p))
    assert code == 2
    assert "line 1" in err
