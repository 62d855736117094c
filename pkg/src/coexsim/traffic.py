"""Arrival processes feeding station and cell queues."""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import Engine
from .rng import NodeStream

FULL_BUFFER = "full-buffer"
POISSON = "poisson"
SCRIPTED = "scripted"
NONE = "none"

_MODES = (FULL_BUFFER, POISSON, SCRIPTED, NONE)


@dataclass
class TrafficModel:
    mode: str = FULL_BUFFER
    frame_bits: int = 12_000
    mean_interarrival_ns: int = 0
    arrivals_ns: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.mode not in _MODES:
            raise ValueError(f"unknown traffic mode {self.mode!r}")
        if self.mode is not NONE and self.frame_bits <= 0:
            raise ValueError("frame_bits must be positive")
        if self.mode == POISSON and self.mean_interarrival_ns <= 0:
            raise ValueError("poisson traffic needs mean_interarrival_ns > 0")
        if self.mode == SCRIPTED:
            if not self.arrivals_ns:
                raise ValueError("scripted traffic needs at least one arrival")
            if any(b < a for a, b in zip(self.arrivals_ns, self.arrivals_ns[1:])):
                raise ValueError("scripted arrivals must be sorted")
            if self.arrivals_ns[0] < 0:
                raise ValueError("scripted arrivals must be >= 0")


class TrafficSource:
    """Drives one queue according to its model.

    Full-buffer keeps exactly one frame enqueued at all times and refills on
    the drain callback, so the node is permanently saturated without the queue
    growing unboundedly. Poisson schedules an open-ended renewal process;
    scripted replays a fixed arrival list.
    """

    def __init__(self, model: TrafficModel, engine: Engine, stream: NodeStream,
                 deliver) -> None:
        self.model = model
        self.engine = engine
        self.stream = stream
        self.deliver = deliver

    def start(self) -> None:
        m = self.model
        if m.mode == NONE:
            return
        if m.mode == FULL_BUFFER:
            self.engine.schedule(self.engine.now, self._deliver_one, kind="arrival")
        elif m.mode == POISSON:
            self._schedule_next()
        else:
            for t in m.arrivals_ns:
                self.engine.schedule(t, self._deliver_one, kind="arrival")

    def on_drained(self, at: int) -> None:
        if self.model.mode == FULL_BUFFER:
            self._deliver_one()

    def _deliver_one(self) -> None:
        self.deliver(self.model.frame_bits)

    def _schedule_next(self) -> None:
        gap = self.stream.exponential_ns(self.model.mean_interarrival_ns)
        self.engine.schedule(self.engine.now + gap, self._on_poisson, kind="arrival")

    def _on_poisson(self) -> None:
        self._deliver_one()
        self._schedule_next()
