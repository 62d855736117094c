import pytest
from hypothesis import given, strategies as st

from coexsim.trace import (TraceError, TraceLog, TraceParseError, TraceRecord,
                           parse_line, parse_trace)


def test_emit_and_line_format():
    log = TraceLog()
    log.emit(84000, "C", "tx-start", kind="wifi-data", dur_ns=200000, ok=True)
    assert log.lines() == ["84000,C,tx-start,kind=wifi-data dur_ns=200000 ok=1"]


def test_bools_become_ints():
    log = TraceLog()
    log.emit(0, "n", "e", flag=False)
    assert log.records[0].detail["flag"] == "0"


def test_floats_are_rejected():
    log = TraceLog()
    with pytest.raises(TraceError):
        log.emit(0, "n", "e", share=0.5)


def test_timestamps_must_not_decrease():
    log = TraceLog()
    log.emit(100, "n", "e")
    log.emit(100, "n", "e")  # equal is fine
    with pytest.raises(TraceError):
        log.emit(99, "n", "e")


def test_text_round_trips_through_parse():
    log = TraceLog()
    log.emit(0, "sim", "sim-start", scenario="demo", seed=9)
    log.emit(84000, "C", "tx-start", kind="wifi-data", dur_ns=200000)
    log.emit(84000, "C", "arrival", bits=10800)
    back = parse_trace(log.text())
    assert back == log.records


def test_empty_log_text_and_sha():
    log = TraceLog()
    assert log.text() == ""
    assert isinstance(log.sha256(), str) and len(log.sha256()) == 64


def test_parse_skips_blank_lines():
    records = parse_trace("1,a,e,\n\n  \n2,b,f,k=v\n")
    assert [r.time_ns for r in records] == [1, 2]
    assert records[1].detail == {"k": "v"}


def test_parse_errors_carry_line_numbers():
    with pytest.raises(TraceParseError) as err:
        parse_trace("1,a,e,\nnot-a-record\n")
    assert err.value.line_no == 2

    with pytest.raises(TraceParseError) as err:
        parse_trace("1,a,e,\n0,a,e,\n")  # backwards time
    assert err.value.line_no == 2

    with pytest.raises(TraceParseError) as err:
        parse_trace("x,a,e,\n")
    assert err.value.line_no == 1


def test_parse_rejects_malformed_detail_token():
    with pytest.raises(TraceParseError):
        parse_line("5,n,e,keyonly", 1)
    with pytest.raises(TraceParseError):
        parse_line("5,n,e,=value", 1)


def test_parse_rejects_empty_node_or_event():
    with pytest.raises(TraceParseError):
        parse_line("5,,e,", 1)
    with pytest.raises(TraceParseError):
        parse_line("5,n,,", 1)


def test_detail_may_contain_commas():
    # only the first three commas split fields; detail keeps the rest
    record = parse_line("5,sim,sim-start,nodes=A,B,C", 1)
    assert record.detail == {"nodes": "A,B,C"}


def test_get_int():
    record = TraceRecord(1, "n", "e", {"dur_ns": "44000"})
    assert record.get_int("dur_ns") == 44000


_ident = st.text(alphabet="abcdefghijklmnopqrstuvwxyz_", min_size=1, max_size=8)


@given(st.lists(
    st.tuples(st.integers(min_value=0, max_value=10**12), _ident, _ident,
              st.dictionaries(_ident, st.integers(0, 10**9), max_size=4)),
    max_size=20))
def test_round_trip_property(rows):
    log = TraceLog()
    for time_ns, node, event, detail in sorted(rows, key=lambda r: r[0]):
        log.emit(time_ns, node, event, **detail)
    assert parse_trace(log.text()) == log.records
