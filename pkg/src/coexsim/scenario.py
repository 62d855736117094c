"""Scenario files: schema, validation, and loading.

A scenario is a JSON document with four sections: ``simulation`` (name, seed,
horizon), ``wifi_nodes``, ``lteu_cells``, and ``topology`` (who hears whom).
Topology matrices are indexed by node position: all ``wifi_nodes`` in listed
order, then all ``lteu_cells``.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, ValidationError, model_validator

from . import timebase as tb
from .dcf import DcfParams, wifi_data_duration_ns
from .lteu import LteuParams
from .medium import MAX_BURST_NS
from .traffic import TrafficModel

_NAME_RE = re.compile(r"^[A-Za-z0-9_\-\.]+$")


class ScenarioError(Exception):
    """A scenario file that cannot be used, with a human-readable reason."""


class TrafficSpec(BaseModel):
    mode: Literal["full-buffer", "poisson", "scripted", "none"] = "full-buffer"
    frame_bits: int = Field(default=12_000, gt=0)
    mean_interarrival_ns: int = Field(default=0, ge=0)
    arrivals_ns: list[int] = Field(default_factory=list)

    def to_model(self) -> TrafficModel:
        return TrafficModel(mode=self.mode, frame_bits=self.frame_bits,
                            mean_interarrival_ns=self.mean_interarrival_ns,
                            arrivals_ns=list(self.arrivals_ns))


class WifiMacSpec(BaseModel):
    difs_ns: int = Field(default=34_000, gt=0)
    sifs_ns: int = Field(default=16_000, gt=0)
    backoff_slot_ns: int = Field(default=9_000, gt=0)
    cw_len: int = Field(default=32, ge=1)
    ack_ns: int = Field(default=44_000, gt=0)
    data_rate_bits_per_us: int = Field(default=54, gt=0)
    use_cts_to_self: bool = False

    def to_params(self) -> DcfParams:
        return DcfParams(difs_ns=self.difs_ns, sifs_ns=self.sifs_ns,
                         backoff_slot_ns=self.backoff_slot_ns, cw_len=self.cw_len,
                         ack_ns=self.ack_ns,
                         data_rate_bits_per_us=self.data_rate_bits_per_us,
                         use_cts_to_self=self.use_cts_to_self)


class WifiNodeSpec(BaseModel):
    name: str
    peer: str | None = None
    traffic: TrafficSpec = Field(default_factory=lambda: TrafficSpec(mode="none"))
    mac: WifiMacSpec = Field(default_factory=WifiMacSpec)
    forced_backoffs: list[int] = Field(default_factory=list)


class LteuCellSpec(BaseModel):
    name: str
    cell_id: int = Field(default=0, ge=0, le=503)
    lbt_subframe_index: int = Field(default=0, ge=0, le=9)
    cca_unit_ns: int = Field(default=25_000, ge=tb.MIN_CCA_NS, le=tb.SLOT_NS)
    cw_len: int = Field(default=32, ge=1)
    data_subframes: int = 9
    bits_per_data_subframe: int = Field(default=20_000, gt=0)
    crs_ports: Literal[1, 2, 4] = 1
    traffic: TrafficSpec = Field(default_factory=TrafficSpec)
    forced_countdowns: list[int] = Field(default_factory=list)

    def to_params(self) -> LteuParams:
        return LteuParams(cell_id=self.cell_id,
                          lbt_subframe_index=self.lbt_subframe_index,
                          cca_unit_ns=self.cca_unit_ns, cw_len=self.cw_len,
                          data_subframes=self.data_subframes,
                          bits_per_data_subframe=self.bits_per_data_subframe,
                          crs_ports=self.crs_ports)


class SimulationSpec(BaseModel):
    name: str = "scenario"
    seed: int = Field(default=1, ge=0)
    horizon_ns: int = Field(gt=0)


class TopologySpec(BaseModel):
    energy: list[list[bool]]
    decode: list[list[bool]]


class Scenario(BaseModel):
    simulation: SimulationSpec
    wifi_nodes: list[WifiNodeSpec] = Field(default_factory=list)
    lteu_cells: list[LteuCellSpec] = Field(default_factory=list)
    topology: TopologySpec

    @property
    def node_names(self) -> list[str]:
        return [w.name for w in self.wifi_nodes] + [c.name for c in self.lteu_cells]

    @model_validator(mode="after")
    def _check(self) -> "Scenario":
        names = self.node_names
        if not names:
            raise ValueError("scenario has no nodes")
        seen: set[str] = set()
        for name in names:
            if not _NAME_RE.match(name):
                raise ValueError(f"node name {name!r} has characters outside "
                                 "[A-Za-z0-9_.-]")
            if name == "sim":
                raise ValueError("node name 'sim' is reserved")
            if name in seen:
                raise ValueError(f"duplicate node name {name!r}")
            seen.add(name)

        wifi_names = {w.name for w in self.wifi_nodes}
        for w in self.wifi_nodes:
            if w.peer is not None:
                if w.peer not in wifi_names:
                    raise ValueError(f"{w.name}: peer {w.peer!r} is not a "
                                     "wifi node")
                if w.peer == w.name:
                    raise ValueError(f"{w.name}: peer cannot be itself")
            elif w.traffic.mode != "none":
                raise ValueError(f"{w.name}: traffic configured but no peer")
            for value in w.forced_backoffs:
                if not 0 <= value < w.mac.cw_len:
                    raise ValueError(f"{w.name}: forced backoff {value} outside "
                                     f"[0, {w.mac.cw_len})")
            if w.traffic.mode != "none":
                dur = wifi_data_duration_ns(w.traffic.frame_bits,
                                            w.mac.data_rate_bits_per_us)
                if dur > MAX_BURST_NS:
                    raise ValueError(f"{w.name}: a {w.traffic.frame_bits}-bit "
                                     f"frame lasts {dur} ns, beyond the "
                                     f"{MAX_BURST_NS} ns burst limit")

        for c in self.lteu_cells:
            for value in c.forced_countdowns:
                if not 0 <= value < c.cw_len:
                    raise ValueError(f"{c.name}: forced countdown {value} "
                                     f"outside [0, {c.cw_len})")

        n = len(names)
        for label, matrix in (("energy", self.topology.energy),
                              ("decode", self.topology.decode)):
            if len(matrix) != n or any(len(row) != n for row in matrix):
                raise ValueError(f"topology.{label} must be {n}x{n} to match "
                                 "the node list")
        for i in range(n):
            for j in range(n):
                if i == j and (self.topology.energy[i][i] or self.topology.decode[i][i]):
                    raise ValueError(f"topology: {names[i]} cannot hear itself")
                if self.topology.decode[i][j] and not self.topology.energy[i][j]:
                    raise ValueError(
                        f"topology: {names[j]} decodes {names[i]} without "
                        "sensing its energy")
        return self


def _format_validation_error(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def scenario_from_dict(data: dict) -> Scenario:
    try:
        return Scenario.model_validate(data)
    except ValidationError as exc:
        raise ScenarioError(_format_validation_error(exc)) from exc


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON at line {exc.lineno}, "
                            f"column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ScenarioError(f"{path}: top level must be a JSON object")
    return scenario_from_dict(data)


def dump_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario.model_dump(), indent=2) + "\n"
