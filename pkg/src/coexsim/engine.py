"""Discrete-event core: integer-ns clock and a totally ordered event queue.

Events are ordered by (time, seq) where seq is the global scheduling order, so
two runs that schedule the same work in the same order replay identically.
Cancellation is lazy: entries are tombstoned and skipped on pop.
"""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass, field
from typing import Callable


class SimulationError(Exception):
    """Hard error in the simulation core; the run must abort."""


class SchedulingInPastError(SimulationError):
    pass


class UnknownHandleError(SimulationError):
    pass


class CancelResult(enum.Enum):
    CANCELLED = "cancelled"
    ALREADY_FIRED = "already-fired"
    ALREADY_CANCELLED = "already-cancelled"


_PENDING, _FIRED, _CANCELLED = 0, 1, 2


@dataclass(order=True)
class _Event:
    time: int
    seq: int
    callback: Callable[[], None] = field(compare=False)
    node: int = field(compare=False, default=-1)
    kind: str = field(compare=False, default="timer")


class Engine:
    """Event queue with schedule/cancel/run_until and a monotone clock."""

    def __init__(self, record_fired: bool = False) -> None:
        self.now: int = 0
        self._heap: list[_Event] = []
        # one state byte per handle ever issued, so cancelling a handle that
        # already fired stays a cheap signal instead of a lost lookup
        self._states = bytearray()
        self._pending = 0
        self._record = record_fired
        self.fired_log: list[tuple[int, int, int, str]] = []

    def schedule(self, time: int, callback: Callable[[], None],
                 node: int = -1, kind: str = "timer") -> int:
        """Queue a callback; returns a handle usable with cancel()."""
        if time < self.now:
            raise SchedulingInPastError(
                f"schedule at {time} ns but clock is {self.now} ns")
        seq = len(self._states)
        self._states.append(_PENDING)
        self._pending += 1
        heapq.heappush(self._heap, _Event(time, seq, callback, node, kind))
        return seq

    def cancel(self, handle: int) -> CancelResult:
        if not 0 <= handle < len(self._states):
            raise UnknownHandleError(f"unknown event handle {handle}")
        state = self._states[handle]
        if state == _FIRED:
            return CancelResult.ALREADY_FIRED
        if state == _CANCELLED:
            return CancelResult.ALREADY_CANCELLED
        self._states[handle] = _CANCELLED
        self._pending -= 1
        return CancelResult.CANCELLED

    def run_until(self, t_end: int) -> int:
        """Fire every pending event with time <= t_end; returns count fired."""
        fired = 0
        heap = self._heap
        while heap and heap[0].time <= t_end:
            event = heapq.heappop(heap)
            if self._states[event.seq] != _PENDING:
                continue
            self.now = event.time
            self._states[event.seq] = _FIRED
            self._pending -= 1
            if self._record:
                self.fired_log.append((event.time, event.seq, event.node, event.kind))
            event.callback()
            fired += 1
        self.now = max(self.now, t_end)
        return fired

    def pending_count(self) -> int:
        return self._pending
