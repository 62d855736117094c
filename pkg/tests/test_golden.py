import pytest

from coexsim.builtins import GOLDEN_NAMES, get_builtin
from coexsim.golden import (GoldenError, _first_divergence, golden_names,
                            load_golden_text, replay_builtin)
from coexsim.runner import run_scenario
from coexsim.trace import parse_trace


def test_golden_names():
    assert golden_names() == ("fig2", "fig5b", "fig5c", "fig6")


@pytest.mark.parametrize("name", GOLDEN_NAMES)
def test_stored_traces_replay_byte_identical(name):
    result = replay_builtin(name)
    assert result.ok, (result.divergence_line, result.expected_line,
                       result.actual_line)
    assert result.expected_sha256 == result.actual_sha256
    assert result.divergence_line is None


@pytest.mark.parametrize("name", GOLDEN_NAMES)
def test_stored_traces_parse_and_audit_clean(name):
    from coexsim.metrics import audit_compliance

    records = parse_trace(load_golden_text(name))
    assert records[0].event == "sim-start"
    assert records[-1].event == "sim-end"
    assert audit_compliance(records).ok


def test_unknown_golden_raises():
    with pytest.raises(GoldenError):
        load_golden_text("no-such-scenario")


def test_divergence_reports_first_differing_line():
    line, exp, act = _first_divergence("a\nb\nc\n", "a\nX\nc\n")
    assert (line, exp, act) == (2, "b", "X")


def test_divergence_reports_truncation():
    line, exp, act = _first_divergence("a\nb\n", "a\n")
    assert (line, exp, act) == (2, "b", "")
    line, exp, act = _first_divergence("a\n", "a\nb\n")
    assert (line, exp, act) == (2, "", "b")


def test_fresh_run_differs_from_golden_under_other_seed():
    scenario = get_builtin("fig2")
    baseline = load_golden_text("fig2")
    rerun = run_scenario(scenario, seed=scenario.simulation.seed + 1)
    assert rerun.trace.text() != baseline
