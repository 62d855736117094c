"""Summary statistics and the regulatory audit, both derived from traces.

Everything here is computed from parsed :class:`~coexsim.trace.TraceRecord`
sequences rather than from live simulator state, so a replayed trace file and
a fresh run are audited by exactly the same code path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import timebase as tb
from .trace import TraceRecord

SIM_NODE = "sim"

_DATA_KINDS = ("wifi-data", "lteu-data-subframes")


def jain_index(values: list[int]) -> float:
    """Jain fairness over non-negative allocations; 1.0 for the empty/zero case."""
    n = len(values)
    square_sum = sum(v * v for v in values)
    if n == 0 or square_sum == 0:
        return 1.0
    total = sum(values)
    return (total * total) / (n * square_sum)


def merge_intervals(intervals: list[tuple[int, int]]) -> list[tuple[int, int]]:
    merged: list[tuple[int, int]] = []
    for start, end in sorted(intervals):
        if merged and start <= merged[-1][1]:
            if end > merged[-1][1]:
                merged[-1] = (merged[-1][0], end)
        else:
            merged.append((start, end))
    return merged


@dataclass
class NodeMetrics:
    name: str
    airtime_ns: int = 0
    bits_delivered: int = 0
    data_attempts: int = 0
    data_failures: int = 0

    def throughput_mbps(self, horizon_ns: int) -> float:
        if horizon_ns <= 0:
            return 0.0
        return self.bits_delivered * 1_000 / horizon_ns


@dataclass
class MetricsReport:
    horizon_ns: int
    nodes: dict[str, NodeMetrics]
    contenders: list[str]
    jain_airtime: float
    busy_ns: int

    @property
    def busy_fraction(self) -> float:
        return self.busy_ns / self.horizon_ns if self.horizon_ns else 0.0

    def to_dict(self) -> dict:
        return {
            "horizon_ns": self.horizon_ns,
            "busy_ns": self.busy_ns,
            "busy_fraction": round(self.busy_fraction, 9),
            "jain_airtime": round(self.jain_airtime, 9),
            "contenders": self.contenders,
            "nodes": {
                name: {
                    "airtime_ns": m.airtime_ns,
                    "bits_delivered": m.bits_delivered,
                    "throughput_mbps": round(m.throughput_mbps(self.horizon_ns), 9),
                    "data_attempts": m.data_attempts,
                    "data_failures": m.data_failures,
                }
                for name, m in sorted(self.nodes.items())
            },
        }


def summarize(records: list[TraceRecord], horizon_ns: int | None = None) -> MetricsReport:
    """Airtime, credited throughput, fairness and channel-busy share.

    Airtime counts every emission a node makes (data, acknowledgements,
    reservation and preamble signalling), clipped at the horizon. The fairness
    index runs over the traffic-bearing nodes only — anything that logged at
    least one queue arrival — so pure responders don't dilute it.
    """
    if horizon_ns is None:
        horizon_ns = 0
        for rec in records:
            if rec.event == "sim-end":
                horizon_ns = rec.time_ns
                break
        else:
            if records:
                horizon_ns = records[-1].time_ns

    nodes: dict[str, NodeMetrics] = {}
    contenders: list[str] = []
    all_intervals: list[tuple[int, int]] = []

    def node(name: str) -> NodeMetrics:
        if name not in nodes:
            nodes[name] = NodeMetrics(name)
        return nodes[name]

    for rec in records:
        if rec.node == SIM_NODE:
            continue
        if rec.event == "arrival":
            if rec.node not in contenders:
                contenders.append(rec.node)
            node(rec.node)
        elif rec.event == "tx-start":
            start = rec.time_ns
            end = min(start + rec.get_int("dur_ns"), horizon_ns)
            if end > start:
                node(rec.node).airtime_ns += end - start
                all_intervals.append((start, end))
            if rec.detail.get("kind") in _DATA_KINDS:
                node(rec.node).data_attempts += 1
        elif rec.event == "tx-end" and rec.detail.get("kind") in _DATA_KINDS:
            m = node(rec.node)
            m.bits_delivered += rec.get_int("bits_credited")
            if not rec.get_int("ok"):
                m.data_failures += 1

    busy_ns = sum(end - start for start, end in merge_intervals(all_intervals))
    jain = jain_index([nodes[n].airtime_ns for n in contenders])
    return MetricsReport(horizon_ns=horizon_ns, nodes=nodes,
                         contenders=contenders, jain_airtime=jain,
                         busy_ns=busy_ns)


# -- regulatory audit ------------------------------------------------------------


@dataclass
class BurstAudit:
    cell: str
    start_ns: int
    end_ns: int
    occupancy_ns: int
    within_cap: bool
    within_range: bool
    idle_after_ns: int | None = None     # unknown for the last/truncated burst
    idle_ok: bool | None = None          # gap >= 5% of the occupancy cap
    duty_ok: bool | None = None          # gap >= 5% of this burst's own length

    def to_dict(self) -> dict:
        return {
            "cell": self.cell, "start_ns": self.start_ns, "end_ns": self.end_ns,
            "occupancy_ns": self.occupancy_ns, "within_cap": self.within_cap,
            "within_range": self.within_range, "idle_after_ns": self.idle_after_ns,
            "idle_ok": self.idle_ok, "duty_ok": self.duty_ok,
        }


@dataclass
class ComplianceReport:
    bursts: list[BurstAudit] = field(default_factory=list)
    cca_count: int = 0
    min_cca_ns: int | None = None
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "bursts": [b.to_dict() for b in self.bursts],
            "cca_count": self.cca_count,
            "min_cca_ns": self.min_cca_ns,
            "violations": self.violations,
        }


# Minimum post-burst gap: 5% of the occupancy cap. Since no burst may exceed
# the cap, meeting this also meets "5% of the burst's own length".
MIN_IDLE_NS = tb.MAX_OCCUPANCY_NS * 5 // 100


def audit_compliance(records: list[TraceRecord],
                     horizon_ns: int | None = None) -> ComplianceReport:
    """Check every unlicensed burst in a trace against the duty-cycle rules.

    Verified per burst: total occupancy inside [1 ms, 10 ms] and at most
    9.5 ms; the gap to the cell's next burst at least 475 us (checked against
    the cap, which is the stricter reading, with the burst-relative 5% figure
    reported alongside); and every clear-channel check at least 20 us long.
    The gap after a cell's final burst is unknowable and left unjudged.
    """
    report = ComplianceReport()
    per_cell: dict[str, list[BurstAudit]] = {}

    for rec in records:
        if rec.event == "layout":
            start = rec.time_ns
            end = rec.get_int("burst_end")
            occ = end - start
            audit = BurstAudit(
                cell=rec.node, start_ns=start, end_ns=end, occupancy_ns=occ,
                within_cap=occ <= tb.MAX_OCCUPANCY_NS,
                within_range=tb.OCCUPANCY_RANGE_NS[0] <= occ <= tb.OCCUPANCY_RANGE_NS[1],
            )
            prev = per_cell.get(rec.node)
            if prev:
                gap = start - prev[-1].end_ns
                prev[-1].idle_after_ns = gap
                prev[-1].idle_ok = gap >= MIN_IDLE_NS
                prev[-1].duty_ok = gap * 20 >= prev[-1].occupancy_ns
            per_cell.setdefault(rec.node, []).append(audit)
            report.bursts.append(audit)
        elif rec.event == "cca":
            dur = rec.time_ns - rec.get_int("start")
            report.cca_count += 1
            if report.min_cca_ns is None or dur < report.min_cca_ns:
                report.min_cca_ns = dur
            if dur < tb.MIN_CCA_NS:
                report.violations.append(
                    f"{rec.node}: clear-channel check of {dur} ns at "
                    f"{rec.get_int('start')} ns is shorter than {tb.MIN_CCA_NS} ns")

    for audit in report.bursts:
        if not audit.within_cap:
            report.violations.append(
                f"{audit.cell}: burst at {audit.start_ns} ns occupies "
                f"{audit.occupancy_ns} ns, above the {tb.MAX_OCCUPANCY_NS} ns cap")
        if not audit.within_range:
            report.violations.append(
                f"{audit.cell}: burst at {audit.start_ns} ns occupies "
                f"{audit.occupancy_ns} ns, outside the allowed range")
        if audit.idle_ok is False:
            report.violations.append(
                f"{audit.cell}: only {audit.idle_after_ns} ns idle after the "
                f"burst at {audit.start_ns} ns (minimum {MIN_IDLE_NS} ns)")
    return report
