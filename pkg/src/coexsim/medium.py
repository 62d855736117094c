"""Shared-channel model: binary reachability, burst log, sensing, delivery.

Propagation is ideal and instantaneous: a listener either hears a transmitter
(energy_reach) or it does not, and decoding additionally requires decode_reach.
All burst intervals are half-open [start, end) in int ns. There is no capture
effect: any time overlap from a second audible transmitter destroys reception
at that listener.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

from .engine import Engine, SimulationError

# Longest lawful single emission; also bounds how far back overlap scans look.
MAX_BURST_NS = 10_000_000


class MediumError(SimulationError):
    pass


class BurstKind(enum.Enum):
    WIFI_DATA = "wifi-data"
    WIFI_ACK = "wifi-ack"
    CTS_TO_SELF = "cts-to-self"
    LTEU_PREAMBLE = "lteu-preamble"
    LTEU_DATA = "lteu-data-subframes"


# Wi-Fi receivers can decode these; LTE-u data subframes are noise to them.
WIFI_READABLE = {BurstKind.WIFI_DATA, BurstKind.WIFI_ACK, BurstKind.CTS_TO_SELF}


@dataclass
class Burst:
    tx: int
    kind: BurstKind
    start: int
    end: int
    intended_rx: int | None = None          # None = broadcast / no single target
    duration_field: int | None = None       # medium reservation carried in-frame
    payload_bits: int = 0
    fid: int = 0                            # per-transmitter frame id (data only)
    burst_id: int = field(default=-1, compare=False)

    def overlaps(self, start: int, end: int) -> bool:
        return self.start < end and start < self.end


@dataclass(frozen=True)
class SenseVerdict:
    busy: bool
    cause: tuple[int, ...]   # burst ids of the overlapping audible bursts


@dataclass(frozen=True)
class DeliveryOutcome:
    receiver: int
    delivered: bool
    credited: bool
    reason: str              # ok | collision | no-decode | rx-was-transmitting


class Topology:
    """Square boolean reach matrices; decode implies energy, diagonal false."""

    def __init__(self, energy_reach: list[list[bool]],
                 decode_reach: list[list[bool]]) -> None:
        n = len(energy_reach)
        if any(len(row) != n for row in energy_reach) or \
           len(decode_reach) != n or any(len(row) != n for row in decode_reach):
            raise MediumError("reach matrices must be square and same-sized")
        for i in range(n):
            if energy_reach[i][i] or decode_reach[i][i]:
                raise MediumError(f"node {i}: diagonal must be false")
            for j in range(n):
                if decode_reach[i][j] and not energy_reach[i][j]:
                    raise MediumError(
                        f"decode_reach[{i}][{j}] without energy_reach")
        self.n = n
        self.energy = [tuple(row) for row in energy_reach]
        self.decode = [tuple(row) for row in decode_reach]


class Medium:
    """Tracks every burst ever sent and answers sensing/delivery queries.

    Listeners register callbacks for busy/idle edges (driven by the count of
    audible active bursts) and for frames successfully decoded for them.
    Callback order is always ascending node id, which keeps runs deterministic.
    """

    def __init__(self, topology: Topology, engine: Engine,
                 node_names: list[str] | None = None) -> None:
        self.topology = topology
        self.engine = engine
        self.node_names = node_names or [f"n{i}" for i in range(topology.n)]
        self.log: list[Burst] = []
        self._active: dict[int, Burst] = {}
        self._heard: list[list[Burst]] = [[] for _ in range(topology.n)]
        self._sent: list[list[Burst]] = [[] for _ in range(topology.n)]
        self._audible: list[int] = [0] * topology.n
        self._on_busy: dict[int, Callable[[int], None]] = {}
        self._on_idle: dict[int, Callable[[int], None]] = {}
        self._on_rx: dict[int, Callable[[Burst, int], None]] = {}
        self._seen_frames: set[tuple[int, int, int]] = set()   # (rx, tx, fid)

    def register(self, node: int,
                 on_busy: Callable[[int], None] | None = None,
                 on_idle: Callable[[int], None] | None = None,
                 on_rx: Callable[[Burst, int], None] | None = None) -> None:
        if on_busy:
            self._on_busy[node] = on_busy
        if on_idle:
            self._on_idle[node] = on_idle
        if on_rx:
            self._on_rx[node] = on_rx

    # -- transmission ------------------------------------------------------

    def begin_tx(self, burst: Burst) -> Burst:
        now = self.engine.now
        if burst.start != now:
            raise MediumError(f"burst start {burst.start} != clock {now}")
        if burst.end <= burst.start:
            raise MediumError("burst must have positive duration")
        if burst.end - burst.start > MAX_BURST_NS:
            raise MediumError(
                f"burst of {burst.end - burst.start} ns exceeds {MAX_BURST_NS}")
        if burst.tx in self._active:
            raise MediumError(f"node {burst.tx} is already transmitting")
        burst.burst_id = len(self.log)
        self.log.append(burst)
        self._active[burst.tx] = burst
        self._sent[burst.tx].append(burst)
        reach = self.topology.energy[burst.tx]
        for node in range(self.topology.n):
            if not reach[node]:
                continue
            self._heard[node].append(burst)
            self._audible[node] += 1
            if self._audible[node] == 1 and node in self._on_busy:
                self._on_busy[node](now)
        return burst

    def end_tx(self, tx: int) -> list[DeliveryOutcome]:
        now = self.engine.now
        burst = self._active.get(tx)
        if burst is None:
            raise MediumError(f"node {tx} has no active burst")
        if burst.end != now:
            raise MediumError(
                f"burst scheduled to end at {burst.end} but clock is {now}")
        del self._active[tx]
        outcomes = self._deliver(burst)
        # Deliveries (NAV updates and the like) land before idle edges so a
        # listener never observes "idle" with a stale virtual-carrier view.
        reach = self.topology.energy[tx]
        for node in range(self.topology.n):
            if not reach[node]:
                continue
            self._audible[node] -= 1
            if self._audible[node] == 0 and node in self._on_idle:
                self._on_idle[node](now)
        return outcomes

    def active_burst(self, node: int) -> Burst | None:
        return self._active.get(node)

    # -- queries -----------------------------------------------------------

    def sense(self, listener: int, window_start: int, window_len: int) -> SenseVerdict:
        """Energy detection over a completed window [start, start+len).

        The window must already be in the past (or end exactly now): sensing
        is always retrospective, a verdict about what happened, so repeated
        identical queries agree.
        """
        if window_len <= 0:
            raise MediumError("sense window must have positive length")
        window_end = window_start + window_len
        if window_end > self.engine.now:
            raise MediumError(
                f"sense window ends at {window_end}, after clock {self.engine.now}")
        cause = [b.burst_id for b in self._scan(listener, window_start, window_end)]
        return SenseVerdict(busy=bool(cause), cause=tuple(sorted(cause)))

    def busy_now(self, listener: int) -> bool:
        return self._audible[listener] > 0

    def decodable_frames(self, listener: int, at: int) -> list[Burst]:
        """Frames fully received by `at` that this listener decoded cleanly."""
        result = []
        for burst in self.log:
            if burst.end > at:
                continue
            if not self.topology.decode[burst.tx][listener]:
                continue
            if self._collided_at(listener, burst) or \
                    self._listener_transmitted(listener, burst):
                continue
            result.append(burst)
        return result

    # -- internals ---------------------------------------------------------

    def _scan(self, listener: int, start: int, end: int,
              exclude: Burst | None = None) -> list[Burst]:
        """Audible bursts overlapping [start, end), newest first.

        Bursts are appended in start order and bounded by MAX_BURST_NS, so a
        backward scan can stop once starts drop below start - MAX_BURST_NS.
        """
        hits = []
        heard = self._heard[listener]
        for i in range(len(heard) - 1, -1, -1):
            burst = heard[i]
            if burst.start <= start - MAX_BURST_NS:
                break
            if burst is exclude or not burst.overlaps(start, end):
                continue
            hits.append(burst)
        return hits

    def _collided_at(self, listener: int, burst: Burst) -> bool:
        for other in self._scan(listener, burst.start, burst.end, exclude=burst):
            if other.tx != burst.tx:
                return True
        return False

    def _listener_transmitted(self, listener: int, burst: Burst) -> bool:
        for own in reversed(self._sent[listener]):
            if own.start <= burst.start - MAX_BURST_NS:
                break
            if own.overlaps(burst.start, burst.end):
                return True
        return False

    def _receive(self, burst: Burst, receiver: int) -> DeliveryOutcome:
        if not self.topology.decode[burst.tx][receiver]:
            return DeliveryOutcome(receiver, False, False, "no-decode")
        if self._collided_at(receiver, burst):
            return DeliveryOutcome(receiver, False, False, "collision")
        if self._listener_transmitted(receiver, burst):
            return DeliveryOutcome(receiver, False, False, "rx-was-transmitting")
        credited = False
        if burst.kind is BurstKind.WIFI_DATA:
            key = (receiver, burst.tx, burst.fid)
            credited = key not in self._seen_frames
            self._seen_frames.add(key)
        return DeliveryOutcome(receiver, True, credited, "ok")

    def _deliver(self, burst: Burst) -> list[DeliveryOutcome]:
        outcomes: list[DeliveryOutcome] = []
        if burst.kind in (BurstKind.WIFI_DATA, BurstKind.WIFI_ACK):
            if burst.intended_rx is None:
                raise MediumError(f"{burst.kind.value} burst needs a receiver")
            outcomes.append(self._receive(burst, burst.intended_rx))
        elif burst.kind in (BurstKind.CTS_TO_SELF, BurstKind.LTEU_PREAMBLE):
            for node in range(self.topology.n):
                if node != burst.tx and self.topology.decode[burst.tx][node]:
                    outcomes.append(self._receive(burst, node))
        else:  # LTEU_DATA: downlink receivers are unmodelled; judge the burst
            # by interference audible at the cell itself.
            clean = not any(
                other.tx != burst.tx
                for other in self._scan(burst.tx, burst.start, burst.end))
            outcomes.append(DeliveryOutcome(
                burst.tx, clean, clean, "ok" if clean else "collision"))
        for outcome in outcomes:
            if outcome.delivered and outcome.receiver != burst.tx:
                handler = self._on_rx.get(outcome.receiver)
                if handler:
                    handler(burst, self.engine.now)
        return outcomes
