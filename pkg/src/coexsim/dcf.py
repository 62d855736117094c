"""Wi-Fi station MAC: DIFS/SIFS spacing, fixed-window backoff, NAV, ACKs.

The contention window never grows and there is no retry cap: every access
attempt draws uniformly from the same window, frozen counters survive busy
periods, and an unacknowledged frame is simply contended for again. A station
whose queue was empty and whose channel is free transmits after a bare DIFS
with no draw at all; every later access goes through backoff.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

from .engine import CancelResult, Engine
from .medium import Burst, BurstKind, Medium
from .rng import NodeStream
from .trace import TraceLog

# Keeps an ACK-loss verdict strictly after a delivered ACK's end event.
ACK_GUARD_NS = 1_000


def wifi_data_duration_ns(payload_bits: int, rate_bits_per_us: int) -> int:
    """On-air time of a data frame; must come out as exact integer ns."""
    scaled = payload_bits * 1_000
    if scaled % rate_bits_per_us:
        raise ValueError(
            f"payload {payload_bits} bits at {rate_bits_per_us} bits/us "
            "does not give an integer-nanosecond duration")
    return scaled // rate_bits_per_us


@dataclass
class DcfParams:
    difs_ns: int = 34_000
    sifs_ns: int = 16_000
    backoff_slot_ns: int = 9_000
    cw_len: int = 32
    ack_ns: int = 44_000
    data_rate_bits_per_us: int = 54
    use_cts_to_self: bool = False

    def __post_init__(self) -> None:
        if self.sifs_ns >= self.difs_ns:
            raise ValueError("sifs must be shorter than difs")
        if min(self.difs_ns, self.sifs_ns, self.backoff_slot_ns,
               self.ack_ns, self.data_rate_bits_per_us) <= 0:
            raise ValueError("timing parameters must be positive")
        if self.cw_len < 1:
            raise ValueError("cw_len must be >= 1")


@dataclass
class Frame:
    fid: int
    bits: int
    dst: int
    duration_ns: int


class _State(enum.Enum):
    IDLE = "idle"            # empty queue, nothing pending
    FAST = "fast"            # initial access: bare DIFS, no draw
    BLOCKED = "blocked"      # frame pending, medium busy or reserved
    ARMING = "arming"        # medium free, DIFS running
    COUNTING = "counting"    # backoff slots elapsing
    TX = "tx"                # own data (or its CTS lead-in) on air
    WAIT_ACK = "wait-ack"


class DcfNode:
    """One Wi-Fi station with a FIFO queue toward a fixed peer."""

    def __init__(self, node_id: int, name: str, params: DcfParams,
                 engine: Engine, medium: Medium, trace: TraceLog,
                 stream: NodeStream, peer: int | None = None) -> None:
        self.node_id = node_id
        self.name = name
        self.params = params
        self.engine = engine
        self.medium = medium
        self.trace = trace
        self.stream = stream
        self.peer = peer
        self.queue: deque[Frame] = deque()
        self.on_drained = None          # set by the traffic source
        self.nav_until = 0
        self._state = _State.IDLE
        self._counter: int | None = None
        self._anchor = 0                # when the current count started
        self._phys_busy = False
        self._self_tx = False
        self._difs_h: int | None = None
        self._expiry_h: int | None = None
        self._expiry_time = 0
        self._timeout_h: int | None = None
        self._nav_wake = 0
        self._fid = 0
        medium.register(node_id, on_busy=self._on_busy, on_idle=self._on_idle,
                        on_rx=self._on_rx)

    # -- queue -----------------------------------------------------------------

    def on_arrival(self, bits: int) -> None:
        if self.peer is None:
            raise ValueError(f"{self.name}: traffic arrived but no peer is set")
        self._fid += 1
        frame = Frame(self._fid, bits, self.peer,
                      wifi_data_duration_ns(bits, self.params.data_rate_bits_per_us))
        self.queue.append(frame)
        now = self.engine.now
        self.trace.emit(now, self.name, "arrival", fid=frame.fid, bits=bits,
                        queued=len(self.queue))
        if self._state is _State.IDLE:
            if self._free(now):
                self._state = _State.FAST
                self._difs_h = self.engine.schedule(
                    now + self.params.difs_ns, self._on_difs,
                    node=self.node_id, kind="difs")
            else:
                self._state = _State.BLOCKED
                self._ensure_nav_wake()

    # -- carrier state ----------------------------------------------------------

    def _free(self, now: int) -> bool:
        return not self._phys_busy and not self._self_tx and self.nav_until <= now

    def _on_busy(self, at: int) -> None:
        self._phys_busy = True
        self._block(at)

    def _on_idle(self, at: int) -> None:
        self._phys_busy = False
        if self.nav_until > at:
            self._ensure_nav_wake()
            return
        self._reconsider(at)

    def _block(self, at: int) -> None:
        """Medium turned busy (or own transmission started): stop timers."""
        if self._state in (_State.FAST, _State.ARMING):
            if self._difs_h is not None:
                self.engine.cancel(self._difs_h)
                self._difs_h = None
            self._state = _State.BLOCKED
        elif self._state is _State.COUNTING:
            assert self._counter is not None
            done = min(self._counter, (at - self._anchor) // self.params.backoff_slot_ns)
            self._counter -= done
            if self._counter == 0:
                # The final decrement lands on this very instant: the expiry
                # event is due now and still fires (simultaneous starts collide).
                return
            if self._expiry_h is not None:
                self.engine.cancel(self._expiry_h)
                self._expiry_h = None
            self._state = _State.BLOCKED
            self.trace.emit(at, self.name, "backoff-freeze",
                            remaining=self._counter)

    def _reconsider(self, at: int) -> None:
        if self._state is _State.BLOCKED and self.queue and self._free(at):
            self._state = _State.ARMING
            self._difs_h = self.engine.schedule(
                at + self.params.difs_ns, self._on_difs,
                node=self.node_id, kind="difs")

    def _ensure_nav_wake(self) -> None:
        if self.nav_until > self._nav_wake:
            self._nav_wake = self.nav_until
            self.engine.schedule(self.nav_until, self._on_nav_wake,
                                 node=self.node_id, kind="nav")

    def _on_nav_wake(self) -> None:
        now = self.engine.now
        if self.nav_until > now:
            self._ensure_nav_wake()
            return
        if not self._phys_busy and not self._self_tx:
            self._reconsider(now)

    # -- DIFS / backoff ----------------------------------------------------------

    def _on_difs(self) -> None:
        now = self.engine.now
        self._difs_h = None
        if self._state is _State.FAST:
            self._begin_data_tx(now)
            return
        assert self._state is _State.ARMING
        if self._counter is None:
            self._counter = self.stream.draw_below(self.params.cw_len)
            self.trace.emit(now, self.name, "backoff-draw",
                            value=self._counter, cw=self.params.cw_len)
        else:
            self.trace.emit(now, self.name, "backoff-resume",
                            remaining=self._counter)
        self._state = _State.COUNTING
        self._anchor = now
        self._expiry_time = now + self._counter * self.params.backoff_slot_ns
        self._expiry_h = self.engine.schedule(
            self._expiry_time, self._on_expiry, node=self.node_id, kind="backoff")

    def _on_expiry(self) -> None:
        self._expiry_h = None
        self._counter = None
        self._begin_data_tx(self.engine.now)

    # -- transmission -------------------------------------------------------------

    def _begin_data_tx(self, now: int) -> None:
        frame = self.queue[0]
        self._state = _State.TX
        self._self_tx = True
        if self.params.use_cts_to_self:
            protect = (self.params.sifs_ns + frame.duration_ns
                       + self.params.sifs_ns + self.params.ack_ns)
            self._send_cts_to_self(now, protect)
        else:
            self._send_data(now, frame)

    def _send_cts_to_self(self, now: int, protect_ns: int) -> None:
        from .timebase import CTS_TO_SELF_NS
        end = now + CTS_TO_SELF_NS
        self.medium.begin_tx(Burst(self.node_id, BurstKind.CTS_TO_SELF,
                                   now, end, duration_field=protect_ns))
        self.trace.emit(now, self.name, "tx-start", kind="cts-to-self",
                        dur_ns=end - now, durfield_ns=protect_ns)
        self.engine.schedule(end, self._on_cts_end, node=self.node_id, kind="tx-end")

    def _on_cts_end(self) -> None:
        now = self.engine.now
        outcomes = self.medium.end_tx(self.node_id)
        self.trace.emit(now, self.name, "tx-end", kind="cts-to-self",
                        readers=sum(o.delivered for o in outcomes))
        self._self_tx = False
        start = now + self.params.sifs_ns
        self.engine.schedule(
            start, lambda: self._send_data(start, self.queue[0]),
            node=self.node_id, kind="cts-gap")

    def _send_data(self, now: int, frame: Frame) -> None:
        self._self_tx = True
        end = now + frame.duration_ns
        durfield = self.params.sifs_ns + self.params.ack_ns
        self.medium.begin_tx(Burst(self.node_id, BurstKind.WIFI_DATA, now, end,
                                   intended_rx=frame.dst, duration_field=durfield,
                                   payload_bits=frame.bits, fid=frame.fid))
        self.trace.emit(now, self.name, "tx-start", kind="wifi-data",
                        dst=self.medium.node_names[frame.dst], fid=frame.fid,
                        dur_ns=frame.duration_ns, durfield_ns=durfield,
                        bits=frame.bits)
        self.engine.schedule(end, self._on_data_end, node=self.node_id, kind="tx-end")

    def _on_data_end(self) -> None:
        now = self.engine.now
        frame = self.queue[0]
        outcome = self.medium.end_tx(self.node_id)[0]
        self.trace.emit(now, self.name, "tx-end", kind="wifi-data",
                        fid=frame.fid, ok=outcome.delivered,
                        bits_credited=frame.bits if outcome.credited else 0)
        self._self_tx = False
        self._state = _State.WAIT_ACK
        self._timeout_h = self.engine.schedule(
            now + self.params.sifs_ns + self.params.ack_ns + ACK_GUARD_NS,
            self._on_ack_timeout, node=self.node_id, kind="ack-timeout")

    def _send_ack(self, data: Burst) -> None:
        now = self.engine.now
        if self._self_tx:
            # Half duplex: an ACK due while we are already emitting is lost.
            self.trace.emit(now, self.name, "ack-drop", to=data.tx)
            return
        self._self_tx = True
        self._block(now)
        end = now + self.params.ack_ns
        self.medium.begin_tx(Burst(self.node_id, BurstKind.WIFI_ACK, now, end,
                                   intended_rx=data.tx, duration_field=0,
                                   fid=data.fid))
        self.trace.emit(now, self.name, "tx-start", kind="wifi-ack",
                        dst=self.medium.node_names[data.tx], fid=data.fid,
                        dur_ns=self.params.ack_ns)
        self.engine.schedule(end, self._on_ack_end, node=self.node_id, kind="tx-end")

    def _on_ack_end(self) -> None:
        now = self.engine.now
        outcome = self.medium.end_tx(self.node_id)[0]
        self.trace.emit(now, self.name, "tx-end", kind="wifi-ack",
                        ok=outcome.delivered)
        self._self_tx = False
        self._reconsider(now)

    def _on_ack_timeout(self) -> None:
        if self._state is not _State.WAIT_ACK:
            return
        self._timeout_h = None
        now = self.engine.now
        frame = self.queue[0]
        self.trace.emit(now, self.name, "ack-timeout", fid=frame.fid)
        self._counter = None
        self._enter_contention(now)

    def _enter_contention(self, now: int) -> None:
        if self._free(now):
            self._state = _State.ARMING
            self._difs_h = self.engine.schedule(
                now + self.params.difs_ns, self._on_difs,
                node=self.node_id, kind="difs")
        else:
            self._state = _State.BLOCKED
            self._ensure_nav_wake()

    # -- reception ----------------------------------------------------------------

    def _on_rx(self, burst: Burst, at: int) -> None:
        if burst.kind is BurstKind.WIFI_DATA and burst.intended_rx == self.node_id:
            self.trace.emit(at, self.name, "rx", kind="wifi-data",
                            src=self.medium.node_names[burst.tx], fid=burst.fid)
            self.engine.schedule(at + self.params.sifs_ns,
                                 lambda: self._send_ack(burst),
                                 node=self.node_id, kind="ack-gap")
            return
        if burst.kind is BurstKind.WIFI_ACK and burst.intended_rx == self.node_id:
            if (self._state is _State.WAIT_ACK and self.queue
                    and burst.fid == self.queue[0].fid
                    and burst.tx == self.queue[0].dst):
                self.trace.emit(at, self.name, "rx", kind="wifi-ack",
                                src=self.medium.node_names[burst.tx],
                                fid=burst.fid)
                if self._timeout_h is not None:
                    self.engine.cancel(self._timeout_h)
                    self._timeout_h = None
                self.queue.popleft()
                if self.on_drained:
                    self.on_drained(at)
                self._state = _State.BLOCKED if self.queue else _State.IDLE
            return
        # Anything else decodable updates the NAV if it carries a reservation
        # and is not addressed to us.
        if burst.duration_field and burst.intended_rx != self.node_id:
            until = burst.end + burst.duration_field
            if until > self.nav_until:
                self.nav_until = until
                self.trace.emit(at, self.name, "nav-set", until=until,
                                src=self.medium.node_names[burst.tx])
                if not self._phys_busy and not self._self_tx:
                    self._ensure_nav_wake()
