"""Trace records: the simulator's line-oriented, float-free output format.

One record per line: ``time_ns,node,event,detail`` where detail is zero or
more space-separated ``key=value`` tokens. Values are integers or short
words, never floats, so byte equality is a meaningful determinism check.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass


class TraceError(Exception):
    pass


class TraceParseError(TraceError):
    def __init__(self, line_no: int, message: str) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class TraceRecord:
    time_ns: int
    node: str
    event: str
    detail: dict[str, str]

    def to_line(self) -> str:
        pairs = " ".join(f"{k}={v}" for k, v in self.detail.items())
        return f"{self.time_ns},{self.node},{self.event},{pairs}"

    def get_int(self, key: str) -> int:
        return int(self.detail[key])


class TraceLog:
    """Append-only record sink; enforces non-decreasing timestamps."""

    def __init__(self) -> None:
        self.records: list[TraceRecord] = []
        self._last_time = 0

    def emit(self, time_ns: int, node: str, event: str, **detail: object) -> None:
        if time_ns < self._last_time:
            raise TraceError(
                f"record at {time_ns} ns after {self._last_time} ns")
        self._last_time = time_ns
        fields = {}
        for key, value in detail.items():
            if isinstance(value, bool):
                value = int(value)
            if isinstance(value, float):
                raise TraceError(f"float value for {key!r} in trace detail")
            fields[key] = str(value)
        self.records.append(TraceRecord(time_ns, node, event, fields))

    def lines(self) -> list[str]:
        return [record.to_line() for record in self.records]

    def text(self) -> str:
        return "\n".join(self.lines()) + ("\n" if self.records else "")

    def sha256(self) -> str:
        return hashlib.sha256(self.text().encode()).hexdigest()


def parse_line(line: str, line_no: int) -> TraceRecord:
    parts = line.split(",", 3)
    if len(parts) != 4:
        raise TraceParseError(line_no, "expected time_ns,node,event,detail")
    time_text, node, event, detail_text = parts
    try:
        time_ns = int(time_text)
    except ValueError:
        raise TraceParseError(line_no, f"bad time_ns {time_text!r}") from None
    if not node or not event:
        raise TraceParseError(line_no, "empty node or event field")
    detail: dict[str, str] = {}
    for token in detail_text.split():
        key, sep, value = token.partition("=")
        if not sep or not key:
            raise TraceParseError(line_no, f"bad detail token {token!r}")
        detail[key] = value
    return TraceRecord(time_ns, node, event, detail)


def parse_trace(text: str) -> list[TraceRecord]:
    """Parse a whole trace document; raises TraceParseError with line numbers."""
    records = []
    last = 0
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        record = parse_line(line, line_no)
        if record.time_ns < last:
            raise TraceParseError(line_no, "timestamps go backwards")
        last = record.time_ns
        records.append(record)
    return records
