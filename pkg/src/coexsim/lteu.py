"""Frame-based LTE-u cell: listen-before-talk, preamble layout, duty cycling.

A cell may start transmitting only after clearing the channel, and only in
the second half of a subframe, so a burst is at most half a subframe of
preamble plus nine subframes of data: the regulatory occupancy cap falls out
of the geometry. The listen-before-talk (LBT) window opens one clear-channel
assessment (CCA) before the second slot of the cell's designated subframe;
if the channel stays busy, sensing repeats the same pattern in each following
subframe until a drawn countdown expires.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import timebase as tb
from .engine import Engine, SimulationError
from .medium import Burst, BurstKind, Medium
from .rng import NodeStream
from .trace import TraceLog


class LayoutError(SimulationError):
    pass


class FrameGrid:
    """OFDM symbol grid: boundaries at round(slot_len * k / 7) within a slot."""

    def __init__(self) -> None:
        bounds = [tb.round_half_up(tb.SLOT_NS * k, tb.SYMBOLS_PER_SLOT)
                  for k in range(tb.SYMBOLS_PER_SLOT + 1)]
        self.symbol_bounds = tuple(bounds)              # 0 .. 500000
        self.symbol_starts = tuple(bounds[:-1])
        self.nominal_symbol_ns = bounds[1]              # 71429

    def subframe_start(self, t: int) -> int:
        return (t // tb.SUBFRAME_NS) * tb.SUBFRAME_NS

    def subframe_index(self, t: int) -> int:
        return (t // tb.SUBFRAME_NS) % tb.SUBFRAMES_PER_FRAME

    def boundary_at_or_after(self, t: int) -> int:
        return -(-t // tb.SUBFRAME_NS) * tb.SUBFRAME_NS

    def next_symbol_start(self, t: int) -> int:
        """Absolute start of the first grid symbol beginning at or after t."""
        slot = (t // tb.SLOT_NS) * tb.SLOT_NS
        offset = t - slot
        for start in self.symbol_starts:
            if start >= offset:
                return slot + start
        return slot + tb.SLOT_NS

    def symbol_end(self, start: int) -> int:
        slot = (start // tb.SLOT_NS) * tb.SLOT_NS
        offset = start - slot
        index = self.symbol_starts.index(offset)
        return slot + self.symbol_bounds[index + 1]

    def is_symbol_boundary(self, t: int) -> bool:
        return (t % tb.SLOT_NS) in self.symbol_bounds

    def symbols_between(self, start: int, end: int) -> tuple[tuple[int, int], ...]:
        """Grid symbols exactly tiling [start, end); both must be boundaries."""
        if start == end:
            return ()
        if not self.is_symbol_boundary(start) or not self.is_symbol_boundary(end):
            raise LayoutError(f"[{start}, {end}) is not symbol-aligned")
        spans = []
        at = start
        while at < end:
            nxt = self.symbol_end(at)
            spans.append((at, nxt))
            at = nxt
        if at != end:
            raise LayoutError(f"symbols do not tile [{start}, {end})")
        return tuple(spans)


GRID = FrameGrid()


@dataclass(frozen=True)
class PreambleLayout:
    """Where one channel occupancy puts its CTS-to-self, uPBCH, CRS and data."""

    success_time: int
    cts_start: int
    cts_end: int
    upbch_end: int
    crs_spans: tuple[tuple[int, int], ...]
    data_start: int
    data_slots: int           # 18 for nine subframes, 17 for the 8.5 case
    burst_end: int
    duration_field: int       # reservation carried by the CTS: cts_end..burst_end

    @property
    def occupancy_ns(self) -> int:
        return self.burst_end - self.cts_start


def min_preamble_ns() -> int:
    """CTS-to-self plus one nominal symbol: the shortest possible preamble."""
    return tb.CTS_TO_SELF_NS + GRID.nominal_symbol_ns


def build_preamble(success_time: int, data_subframes: int = 9) -> PreambleLayout:
    """Lay out the occupancy that starts the instant LBT succeeds.

    The preamble runs from success to the next subframe boundary and the data
    fills `data_subframes` whole subframes from there. If less than a minimum
    preamble remains before that boundary, the preamble instead extends
    through the first slot of the next subframe and the data span shrinks by
    one slot (the 8.5-subframe case). A success instant exactly on a subframe
    boundary counts as residue zero and takes the extended path.
    """
    if success_time < 0:
        raise LayoutError("success_time must be non-negative")
    boundary = GRID.boundary_at_or_after(success_time)
    residue = boundary - success_time
    if residue >= min_preamble_ns():
        data_start = boundary
        data_slots = data_subframes * tb.SLOTS_PER_SUBFRAME
    else:
        data_start = boundary + tb.SLOT_NS
        data_slots = data_subframes * tb.SLOTS_PER_SUBFRAME - 1
    burst_end = data_start + data_slots * tb.SLOT_NS

    cts_end = success_time + tb.CTS_TO_SELF_NS
    # The uPBCH is one grid symbol; its cyclic prefix stretches backward to
    # meet the CTS wherever that ended.
    upbch_symbol_start = GRID.next_symbol_start(cts_end)
    upbch_end = GRID.symbol_end(upbch_symbol_start)
    if upbch_end > data_start:
        raise LayoutError("uPBCH does not fit before the data span")
    crs_spans = GRID.symbols_between(upbch_end, data_start)

    layout = PreambleLayout(
        success_time=success_time,
        cts_start=success_time,
        cts_end=cts_end,
        upbch_end=upbch_end,
        crs_spans=crs_spans,
        data_start=data_start,
        data_slots=data_slots,
        burst_end=burst_end,
        duration_field=burst_end - cts_end,
    )
    if layout.occupancy_ns > tb.MAX_OCCUPANCY_NS:
        raise LayoutError(
            f"occupancy {layout.occupancy_ns} ns exceeds cap; success at "
            f"{success_time} ns is outside the allowed transmit region")
    lo, hi = tb.OCCUPANCY_RANGE_NS
    if not lo <= layout.occupancy_ns <= hi:
        raise LayoutError(f"occupancy {layout.occupancy_ns} ns outside range")
    return layout


def lbt_window_start(frame_start: int, subframe_index: int, cca_unit_ns: int) -> int:
    """LBT opens one CCA before the second slot of the designated subframe."""
    return frame_start + subframe_index * tb.SUBFRAME_NS + tb.SLOT_NS - cca_unit_ns


def next_cca_start(t: int, cca_unit_ns: int) -> int:
    """Earliest CCA start >= t whose window fits a subframe's sensing region.

    Sensing within any subframe runs from (second-slot start - one CCA) to
    the subframe end, so countdown expiry — and therefore transmission —
    can only happen in a second slot or exactly on a subframe boundary.
    """
    subframe = (t // tb.SUBFRAME_NS) * tb.SUBFRAME_NS
    region_lo = subframe + tb.SLOT_NS - cca_unit_ns
    region_hi = subframe + tb.SUBFRAME_NS - cca_unit_ns
    if t <= region_hi:
        return max(t, region_lo)
    return subframe + tb.SUBFRAME_NS + tb.SLOT_NS - cca_unit_ns


@dataclass
class LteuParams:
    cell_id: int
    bits_per_data_subframe: int
    lbt_subframe_index: int = 0
    cca_unit_ns: int = 25_000
    cw_len: int = 32
    data_subframes: int = 9
    crs_ports: int = 4
    seed: int | None = None

    def __post_init__(self) -> None:
        if not 0 <= self.cell_id <= 503:
            raise ValueError("cell_id must be in [0, 503]")
        if not 0 <= self.lbt_subframe_index < tb.SUBFRAMES_PER_FRAME:
            raise ValueError("lbt_subframe_index must be in [0, 9]")
        if self.cca_unit_ns < tb.MIN_CCA_NS:
            raise ValueError(f"cca_unit_ns must be >= {tb.MIN_CCA_NS}")
        if self.cca_unit_ns > tb.SLOT_NS:
            raise ValueError("cca_unit_ns must fit inside a slot")
        if self.cw_len < 1:
            raise ValueError("cw_len must be >= 1")
        if self.data_subframes != 9:
            raise ValueError("data_subframes is fixed at 9")
        if self.bits_per_data_subframe <= 0 or self.bits_per_data_subframe % 2:
            raise ValueError("bits_per_data_subframe must be positive and even")
        if self.crs_ports not in (1, 2, 4):
            raise ValueError("crs_ports must be 1, 2 or 4")


# LBT phases.
_FIRST, _SEEK, _COUNT = "first", "seek", "count"


class LteuCell:
    """One LTE-u cell: frame-synchronous LBT, preamble, nine-subframe bursts."""

    def __init__(self, node_id: int, name: str, params: LteuParams,
                 engine: Engine, medium: Medium, trace: TraceLog,
                 stream: NodeStream) -> None:
        self.node_id = node_id
        self.name = name
        self.params = params
        self.engine = engine
        self.medium = medium
        self.trace = trace
        self.stream = stream
        self.designated_index = params.lbt_subframe_index
        self.queued_bits = 0
        self.deferral_until = 0
        self.on_drained = None          # set by the traffic source
        self._phase: str | None = None
        self._remaining = 0
        self._layout: PreambleLayout | None = None
        medium.register(node_id, on_rx=self._on_rx)

    # -- wiring --------------------------------------------------------------

    def start(self) -> None:
        self._schedule_window(self.engine.now)

    def add_demand(self, bits: int) -> None:
        self.queued_bits += bits
        self.trace.emit(self.engine.now, self.name, "arrival",
                        bits=bits, queued=self.queued_bits)

    # -- LBT -----------------------------------------------------------------

    def _window_time(self, at_or_after: int) -> int:
        base = lbt_window_start(0, self.designated_index, self.params.cca_unit_ns)
        if at_or_after <= base:
            return base
        frames = -(-(at_or_after - base) // tb.FRAME_NS)
        return base + frames * tb.FRAME_NS

    def _schedule_window(self, at_or_after: int) -> None:
        window = self._window_time(at_or_after)
        self.engine.schedule(window, lambda: self._on_window(window),
                             node=self.node_id, kind="lbt-window")

    def _on_window(self, start: int) -> None:
        if self.queued_bits <= 0:
            self._schedule_window(start + 1)    # next frame, same subframe
            return
        self._phase = _FIRST
        self._schedule_cca(start)

    def _schedule_cca(self, start: int) -> None:
        unit = self.params.cca_unit_ns
        self.engine.schedule(start + unit, lambda: self._on_cca(start),
                             node=self.node_id, kind="cca")

    def _on_cca(self, start: int) -> None:
        now = self.engine.now
        if self.deferral_until > start:
            verdict = "defer"
        else:
            verdict = "busy" if self.medium.sense(
                self.node_id, start, now - start).busy else "idle"
        idle = verdict == "idle"

        if self._phase == _FIRST:
            self.trace.emit(now, self.name, "cca",
                            start=start, phase=_FIRST, verdict=verdict)
            if idle:
                self._begin_burst(now)
                return
            self._phase = _SEEK
        elif self._phase == _SEEK:
            self.trace.emit(now, self.name, "cca",
                            start=start, phase=_SEEK, verdict=verdict)
            if idle:
                drawn = self.stream.draw_below(self.params.cw_len)
                self.trace.emit(now, self.name, "countdown-draw", value=drawn)
                if drawn == 0:
                    self._begin_burst(now)
                    return
                self._phase = _COUNT
                self._remaining = drawn
        else:  # _COUNT: decrement on idle, freeze (retain value) on busy/defer
            if idle:
                self._remaining -= 1
            self.trace.emit(now, self.name, "cca", start=start, phase=_COUNT,
                            verdict=verdict, remaining=self._remaining)
            if idle and self._remaining == 0:
                self._begin_burst(now)
                return
        self._schedule_cca(next_cca_start(now, self.params.cca_unit_ns))

    # -- transmission ----------------------------------------------------------

    def _begin_burst(self, success_time: int) -> None:
        layout = build_preamble(success_time, self.params.data_subframes)
        self._layout = layout
        self._phase = None
        secured = GRID.subframe_index(layout.cts_start)
        self.trace.emit(success_time, self.name, "lbt-success",
                        subframe=secured)
        self.trace.emit(
            success_time, self.name, "layout",
            cts_end=layout.cts_end, upbch_end=layout.upbch_end,
            crs=len(layout.crs_spans), data_start=layout.data_start,
            burst_end=layout.burst_end, slots=layout.data_slots,
            durfield_ns=layout.duration_field)
        self._tx(BurstKind.CTS_TO_SELF, layout.cts_start, layout.cts_end,
                 duration_field=layout.duration_field)

    def _tx(self, kind: BurstKind, start: int, end: int,
            duration_field: int | None = None, bits: int = 0) -> None:
        burst = Burst(tx=self.node_id, kind=kind, start=start, end=end,
                      duration_field=duration_field, payload_bits=bits)
        self.medium.begin_tx(burst)
        detail: dict[str, object] = {"kind": kind.value, "dur_ns": end - start}
        if duration_field is not None:
            detail["durfield_ns"] = duration_field
        if bits:
            detail["bits"] = bits
        self.trace.emit(start, self.name, "tx-start", **detail)
        self.engine.schedule(end, lambda: self._on_tx_end(kind),
                             node=self.node_id, kind="tx-end")

    def _on_tx_end(self, kind: BurstKind) -> None:
        now = self.engine.now
        outcomes = self.medium.end_tx(self.node_id)
        layout = self._layout
        assert layout is not None
        if kind is BurstKind.CTS_TO_SELF:
            self.trace.emit(now, self.name, "tx-end", kind=kind.value,
                            readers=sum(o.delivered for o in outcomes))
            self._tx(BurstKind.LTEU_PREAMBLE, layout.cts_end, layout.data_start)
        elif kind is BurstKind.LTEU_PREAMBLE:
            self.trace.emit(now, self.name, "tx-end", kind=kind.value)
            capacity = self.params.bits_per_data_subframe * layout.data_slots // 2
            self._tx(BurstKind.LTEU_DATA, layout.data_start, layout.burst_end,
                     bits=capacity)
        else:
            clean = outcomes[0].delivered
            capacity = self.params.bits_per_data_subframe * layout.data_slots // 2
            credited = min(self.queued_bits, capacity) if clean else 0
            self.queued_bits = max(0, self.queued_bits - capacity)
            self.trace.emit(now, self.name, "tx-end", kind=kind.value,
                            ok=clean, bits_credited=credited)
            self._finish_burst(now)

    def _finish_burst(self, now: int) -> None:
        layout = self._layout
        assert layout is not None
        self.designated_index = GRID.subframe_index(layout.cts_start)
        self.trace.emit(now, self.name, "burst-end",
                        next_lbt_subframe=self.designated_index)
        self._layout = None
        if self.on_drained:
            self.on_drained(now)
        self._schedule_window(now)

    # -- virtual carrier: honor readable Wi-Fi CTS reservations ---------------

    def _on_rx(self, burst: Burst, at: int) -> None:
        if burst.kind is BurstKind.CTS_TO_SELF and burst.duration_field:
            until = burst.end + burst.duration_field
            if until > self.deferral_until:
                self.deferral_until = until
                self.trace.emit(at, self.name, "defer-set", until=until,
                                src=self.medium.node_names[burst.tx])
